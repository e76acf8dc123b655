// SPDX-License-Identifier: Apache-2.0
#include "skipfree/detail/mmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "skipfree/errors.hpp"

namespace skipfree::detail {

SubtractionFreeFactor::SubtractionFreeFactor(std::size_t size, std::vector<double> offdiag,
                                             std::vector<double> leak, EliminationOrder order)
    : size_(size), order_(order), work_(std::move(offdiag)), pivot_(size, 0.0) {
    if (work_.size() != size_ * size_ || leak.size() != size_) {
        throw DomainError("system dimensions do not match");
    }
    // leak in elimination order
    std::vector<double> slack(size_);
    for (std::size_t p = 0; p < size_; ++p) slack[p] = leak[pos(p)];

    std::vector<std::size_t> nz;
    nz.reserve(size_);
    for (std::size_t p = 0; p < size_; ++p) {
        nz.clear();
        double d = slack[p];
        for (std::size_t q = p + 1; q < size_; ++q) {
            const double v = w(p, q);
            if (v != 0.0) {
                nz.push_back(q);
                d += v;
            }
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw SingularTruncation("truncated system is singular: no escape from state " +
                                     std::to_string(pos(p)));
        }
        pivot_[p] = d;
        for (std::size_t r = p + 1; r < size_; ++r) {
            double& wrp = w(r, p);
            if (wrp == 0.0) continue;
            const double l = wrp / d;
            wrp = l;
            for (std::size_t q : nz) {
                if (q != r) w(r, q) += l * w(p, q);
            }
            slack[r] += l * slack[p];
        }
    }
}

std::vector<double> SubtractionFreeFactor::solve(std::span<const double> rhs) const {
    if (rhs.size() != size_) throw DomainError("right-hand side has wrong length");
    std::vector<double> b(size_);
    for (std::size_t p = 0; p < size_; ++p) b[p] = rhs[pos(p)];
    for (std::size_t p = 0; p < size_; ++p) {
        if (b[p] == 0.0) continue;
        for (std::size_t r = p + 1; r < size_; ++r) {
            const double l = w(r, p);
            if (l != 0.0) b[r] += l * b[p];
        }
    }
    for (std::size_t p = size_; p-- > 0;) {
        double s = b[p];
        for (std::size_t q = p + 1; q < size_; ++q) {
            const double v = w(p, q);
            if (v != 0.0) s += v * b[q];
        }
        b[p] = s / pivot_[p];
    }
    std::vector<double> x(size_);
    for (std::size_t p = 0; p < size_; ++p) x[pos(p)] = b[p];
    return x;
}

struct PivotedLuFactor::Impl {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

PivotedLuFactor::PivotedLuFactor(std::size_t size, const std::vector<double>& offdiag,
                                 const std::vector<double>& leak)
    : size_(size) {
    if (offdiag.size() != size_ * size_ || leak.size() != size_) {
        throw DomainError("system dimensions do not match");
    }
    const auto n = static_cast<Eigen::Index>(size_);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = leak[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double o = offdiag[i * size_ + j];
            a(i, j) = -o;
            diag += o;
        }
        a(i, i) = diag;
    }
    auto impl = std::make_shared<Impl>();
    impl->lu.compute(a);
    const double rcond = impl->lu.rcond();
    if (!(rcond >= 1e-14)) {
        throw SingularTruncation("truncated system is singular (reciprocal condition " + std::to_string(rcond) + ")");
    }
    impl_ = std::move(impl);
}

std::vector<double> PivotedLuFactor::solve(std::span<const double> rhs) const {
    if (rhs.size() != size_) throw DomainError("right-hand side has wrong length");
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(size_));
    const Eigen::VectorXd sol = impl_->lu.solve(b);
    std::vector<double> x(sol.data(), sol.data() + sol.size());
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::fabs(v));
    clamped_ = 0;
    for (double& v : x) {
        if (v < 0.0 && v >= -1e-12 * std::max(scale, 1.0)) {
            v = 0.0;
            ++clamped_;
        }
    }
    return x;
}

} // namespace skipfree::detail
