// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNET_GF2_HPP
#define QNET_GF2_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace qnet::gf2 {

using Row = std::vector<std::uint8_t>;

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row (zero rows end up at the bottom).
std::vector<std::size_t> rref(std::vector<Row> &rows);
std::size_t rank(std::vector<Row> rows);
/// One solution x of A x = b, or nullopt when inconsistent.
std::optional<Row> solve(const std::vector<Row> &a, const Row &b, std::size_t cols);
/// Basis of { x : A x = 0 }.
std::vector<Row> nullspace(const std::vector<Row> &a, std::size_t cols);
/// Row-vector / matrix product over GF(2): (A x)_i.
Row mul(const std::vector<Row> &a, const Row &x);
bool in_rowspace(const std::vector<Row> &rows, const Row &v);

}  // namespace qnet::gf2

#endif
