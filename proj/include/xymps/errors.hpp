/*
 * Copyright 2025-2026 The xymps authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XYMPS_ERRORS_HPP
#define XYMPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xymps {

/// Broad failure classes; mirrored by the C API status codes.
enum class ErrorClass {
    domain,   ///< invalid arguments, out of mapping region, dimension mismatch
    numeric,  ///< a numerical invariant failed (lost orthogonality, singular block, ...)
    resource, ///< configured budget exceeded (dense oracle size, enumeration cap)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorClass cls, std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), cls_(cls), code_(std::move(code)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& code() const noexcept { return code_; }

  private:
    ErrorClass cls_;
    std::string code_;
};

inline Error domain_error(std::string code, const std::string& what) {
    return Error(ErrorClass::domain, std::move(code), what);
}
inline Error numeric_error(std::string code, const std::string& what) {
    return Error(ErrorClass::numeric, std::move(code), what);
}
inline Error resource_error(std::string code, const std::string& what) {
    return Error(ErrorClass::resource, std::move(code), what);
}

} // namespace xymps

#endif
