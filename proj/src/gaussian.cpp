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

#include "xymps/gaussian.hpp"

namespace xymps::gaussian {

Matrix thermal_two_point(const Matrix& r) {
    const Eigen::Index n = r.rows();
    Matrix m = Matrix::Identity(n, n) + r;
    Eigen::PartialPivLU<Matrix> lu(m);
    return 2.0 * lu.solve(Matrix::Identity(n, n));
}

} // namespace xymps::gaussian
