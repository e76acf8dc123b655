// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "skipfree/cost.hpp"
#include "skipfree/kernel.hpp"

namespace skipfree {

/// Embedded chain of the GI/M/1 queue with a_k = (z-1)/z^{k+1}, b_k = 1/z^{k+1}.
/// Row i is (b_i, a_i, ..., a_1, a_0) on columns 0..i+1.
class GiM1Kernel final : public TransitionKernel {
public:
    explicit GiM1Kernel(double z);

    double z() const noexcept { return z_; }
    double a(std::size_t k) const;
    double b(std::size_t k) const;

    StateSpace state_space() const override { return StateSpace::countably_infinite(); }
    Structure structure() const override { return Structure::UpwardSkipFree; }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    std::string describe() const override;

private:
    double z_;
};

/// Embedded chain of the M/G/1 queue with a_k = (z-1)/z^{k+1}. Rows 0 and 1 are
/// (a_0, a_1, ...); row m >= 2 starts with a_0 at column m-1. Tail sums are
/// z^{-k} for row 0 and z^{-(k-m+1)} for rows m >= 1.
class MG1Kernel final : public TransitionKernel {
public:
    explicit MG1Kernel(double z);

    double z() const noexcept { return z_; }
    double a(std::size_t k) const;

    StateSpace state_space() const override { return StateSpace::countably_infinite(); }
    Structure structure() const override { return Structure::DownwardSkipFree; }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    bool finite_rows() const override { return false; }
    std::optional<double> analytic_tail(State i, State k) const override;
    std::string describe() const override;

private:
    double z_;
};

/// Birth-death generator with birth rates lambda_i > 0 and death rates
/// mu_i > 0 (i >= 1). Rate arrays repeat their last entry beyond their end.
class BirthDeathGenerator final : public GeneratorKernel {
public:
    BirthDeathGenerator(double lambda, double mu);
    BirthDeathGenerator(std::vector<double> birth, std::vector<double> death);

    double birth(State i) const;
    double death(State i) const;  // i >= 1

    StateSpace state_space() const override { return StateSpace::countably_infinite(); }
    Structure structure() const override { return Structure::BirthDeath; }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    std::optional<double> analytic_tail(State i, State k) const override;
    std::string describe() const override;

private:
    std::vector<double> birth_;  // birth_[i] = lambda_i
    std::vector<double> death_;  // death_[i-1] = mu_i
};

/// Q(i,j) = r_i P(i,j) for j != i and Q(i,i) = -r_i (1 - P(i,i)): the
/// continuous-time chain that holds in i for an Exp(r_i (1 - P(i,i))) time and
/// then jumps like P conditioned on leaving. With unit rates, -Q = I - P.
class GeneratorFromKernel final : public GeneratorKernel {
public:
    explicit GeneratorFromKernel(std::shared_ptr<const TransitionKernel> kernel,
                                 std::function<double(State)> rate = {});

    StateSpace state_space() const override { return kernel_->state_space(); }
    Structure structure() const override { return kernel_->structure(); }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    bool finite_rows() const override { return kernel_->finite_rows(); }
    std::optional<double> analytic_tail(State i, State k) const override;
    std::string describe() const override;

private:
    double rate(State i) const { return rate_ ? rate_(i) : 1.0; }
    double leave_probability(State i) const;

    std::shared_ptr<const TransitionKernel> kernel_;
    std::function<double(State)> rate_;
};

// Closed forms for the packaged examples. Each throws RegimeError outside the
// parameter range where the expression holds.

/// Cost c(i) = z^{-i} used with the GI/M/1 example.
CostFunction gim1_example_cost(double z);
/// phi(i) = z / ((z-2)(z-1)^i), z > 2.
double gim1_closed_potential(double z, State i);
/// F_n^{(i)} = 1/(z (z-1)^{n-i}) for n > i, 1 for n = i.
double gim1_closed_f(double z, State i, State n);
/// sum_{k<=m} F_m^{(k)} c(k)/P(k,k+1) = z/(z-1)^{m+1} under the example cost.
double gim1_closed_term(double z, State m);

/// Cost c(0) = 0, c(i) = ((z-1)/z)^i used with the M/G/1 example.
CostFunction mg1_example_cost(double z);
/// phi(i) = (1/(2-z) - (z^2-z+1)/z^i) (z-1)^{i-1}, 1 < z < 2.
double mg1_closed_potential(double z, State i);
/// M(i) = (z-1)^i / (2-z), 1 < z < 2.
double mg1_closed_m(double z, State i);
/// delta = 1/(z-1) under the example cost, 1 < z < 2.
double mg1_closed_delta(double z);
/// H_m^{(i)} = 1/(z (z-1)^{i-m}) for m < i, 1 for m = i.
double mg1_closed_h(double z, State m, State i);
/// sum_{k=1..n} P_0^{(k+)} H_k^{(n)} = 1/(z (z-1)^{n-1}).
double mg1_closed_denominator(double z, State n);
/// sum_{k=i+1..n} H_k^{(n)} = ((z-1)^{n-i+1} - 1)/(z (z-2) (z-1)^{n-i-1}), z != 2.
double mg1_closed_numerator(double z, State i, State n);
/// sum_{k>=m} H_m^{(k)} c(k)/P(k,k-1) = (z-1)^{m-2}/z^m + ((z-1)/z)^{m-1}, m >= 1.
double mg1_closed_lemma_tail(double z, State m);

/// psi(i) = (mu/lambda)^i / (lambda - mu) for c = indicator(0), lambda > mu.
double birth_death_closed_potential(double lambda, double mu, State i);

/// Dense CSV matrix (row-major, no header). A negative diagonal entry marks a
/// generator; otherwise the matrix must be stochastic. Rows must sum to 1
/// (kernels) or 0 (generators) within 1e-9.
using FiniteModel = std::variant<std::shared_ptr<FiniteKernel>, std::shared_ptr<FiniteGenerator>>;
FiniteModel load_finite_matrix(const std::filesystem::path& path);
FiniteModel finite_model_from_dense(std::vector<std::vector<double>> dense);

} // namespace skipfree
