#pragma once

#include "ssocert/linalg.hpp"

#include <initializer_list>

namespace testutil {

inline ssocert::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    ssocert::Matrix m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline ssocert::Matrix diag(std::initializer_list<double> values) {
    ssocert::Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v.asDiagonal();
}

inline ssocert::Matrix sym_unit(int m, int i, int j) {
    ssocert::Matrix e = ssocert::Matrix::Zero(m, m);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    return e;
}

inline ssocert::Matrix unit(int rows, int cols, int i, int j) {
    ssocert::Matrix e = ssocert::Matrix::Zero(rows, cols);
    e(i, j) = 1.0;
    return e;
}

}  // namespace testutil
