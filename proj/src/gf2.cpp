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

#include "qnet/gf2.hpp"

#include <utility>

namespace qnet::gf2 {

std::vector<std::size_t> rref(std::vector<Row> &rows) {
    std::vector<std::size_t> pivots;
    if (rows.empty()) {
        return pivots;
    }
    const std::size_t cols = rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); c++) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p][c]) {
            p++;
        }
        if (p == rows.size()) {
            continue;
        }
        std::swap(rows[r], rows[p]);
        for (std::size_t i = 0; i < rows.size(); i++) {
            if (i != r && rows[i][c]) {
                for (std::size_t k = 0; k < cols; k++) {
                    rows[i][k] ^= rows[r][k];
                }
            }
        }
        pivots.push_back(c);
        r++;
    }
    return pivots;
}

std::size_t rank(std::vector<Row> rows) {
    return rref(rows).size();
}

std::optional<Row> solve(const std::vector<Row> &a, const Row &b, std::size_t cols) {
    std::vector<Row> aug;
    for (std::size_t i = 0; i < a.size(); i++) {
        Row r(a[i].begin(), a[i].end());
        r.resize(cols);
        r.push_back(b[i]);
        aug.push_back(std::move(r));
    }
    auto pivots = rref(aug);
    Row x(cols, 0);
    for (std::size_t i = 0; i < pivots.size(); i++) {
        if (pivots[i] == cols) {
            return std::nullopt;
        }
        x[pivots[i]] = aug[i][cols];
    }
    return x;
}

std::vector<Row> nullspace(const std::vector<Row> &a, std::size_t cols) {
    std::vector<Row> m = a;
    for (auto &r : m) {
        r.resize(cols);
    }
    auto pivots = rref(m);
    std::vector<std::uint8_t> is_pivot(cols, 0);
    for (auto p : pivots) {
        is_pivot[p] = 1;
    }
    std::vector<Row> basis;
    for (std::size_t f = 0; f < cols; f++) {
        if (is_pivot[f]) {
            continue;
        }
        Row v(cols, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); i++) {
            v[pivots[i]] = m[i][f];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

Row mul(const std::vector<Row> &a, const Row &x) {
    Row out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); i++) {
        std::uint8_t acc = 0;
        for (std::size_t k = 0; k < x.size() && k < a[i].size(); k++) {
            acc ^= a[i][k] & x[k];
        }
        out[i] = acc;
    }
    return out;
}

bool in_rowspace(const std::vector<Row> &rows, const Row &v) {
    std::vector<Row> m = rows;
    std::size_t r0 = rank(m);
    m.push_back(v);
    return rank(m) == r0;
}

}  // namespace qnet::gf2
