// SPDX-License-Identifier: Apache-2.0
#include "skipfree/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skipfree/errors.hpp"
#include "skipfree/series.hpp"

namespace skipfree {

namespace {

void require_z(double z) {
    if (!(z > 1.0) || !std::isfinite(z)) {
        throw DomainError("queue parameter z must be a finite number > 1");
    }
}

double ipow(double x, double e) { return std::pow(x, e); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------- GI/M/1

GiM1Kernel::GiM1Kernel(double z) : z_(z) { require_z(z); }

double GiM1Kernel::a(std::size_t k) const { return (z_ - 1.0) * ipow(z_, -static_cast<double>(k + 1)); }
double GiM1Kernel::b(std::size_t k) const { return ipow(z_, -static_cast<double>(k + 1)); }

void GiM1Kernel::row(State i, State max_col, std::vector<Entry>& out) const {
    out.clear();
    const double b0 = b(i);
    if (b0 != 0.0) out.push_back({0, b0});
    const State last = std::min<State>(i + 1, max_col);
    for (State j = 1; j <= last; ++j) {
        const double v = a(i + 1 - j);
        if (v != 0.0) out.push_back({j, v});
    }
}

std::string GiM1Kernel::describe() const { return "GI/M/1 embedded chain (z=" + num(z_) + ")"; }

// ---------------------------------------------------------------- M/G/1

MG1Kernel::MG1Kernel(double z) : z_(z) { require_z(z); }

double MG1Kernel::a(std::size_t k) const { return (z_ - 1.0) * ipow(z_, -static_cast<double>(k + 1)); }

void MG1Kernel::row(State i, State max_col, std::vector<Entry>& out) const {
    if (max_col == kNoLimit) {
        throw CapabilityError("M/G/1 rows have infinite support; enumerate with a column bound");
    }
    out.clear();
    const State first = i <= 1 ? 0 : i - 1;
    for (State j = first; j <= max_col; ++j) {
        const double v = a(j - first);
        if (v == 0.0) break;  // underflow: every later entry is zero as well
        out.push_back({j, v});
    }
}

std::optional<double> MG1Kernel::analytic_tail(State i, State k) const {
    if (k <= i) return std::nullopt;
    const double e = i == 0 ? static_cast<double>(k) : static_cast<double>(k - i + 1);
    return ipow(z_, -e);
}

std::string MG1Kernel::describe() const { return "M/G/1 embedded chain (z=" + num(z_) + ")"; }

// ---------------------------------------------------------------- birth-death

BirthDeathGenerator::BirthDeathGenerator(double lambda, double mu)
    : BirthDeathGenerator(std::vector<double>{lambda}, std::vector<double>{mu}) {}

BirthDeathGenerator::BirthDeathGenerator(std::vector<double> birth, std::vector<double> death)
    : birth_(std::move(birth)), death_(std::move(death)) {
    if (birth_.empty() || death_.empty()) throw DomainError("birth and death rates must be nonempty");
    for (double v : birth_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw StructureViolation("birth rates must be positive");
    }
    for (double v : death_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("death rates must be positive");
    }
}

double BirthDeathGenerator::birth(State i) const { return birth_[std::min(i, birth_.size() - 1)]; }

double BirthDeathGenerator::death(State i) const {
    if (i == 0) return 0.0;
    return death_[std::min(i - 1, death_.size() - 1)];
}

void BirthDeathGenerator::row(State i, State max_col, std::vector<Entry>& out) const {
    out.clear();
    const double lam = birth(i);
    const double mu = death(i);
    if (i >= 1 && i - 1 <= max_col) out.push_back({i - 1, mu});
    if (i <= max_col) out.push_back({i, -(lam + mu)});
    if (i + 1 <= max_col) out.push_back({i + 1, lam});
}

std::optional<double> BirthDeathGenerator::analytic_tail(State i, State k) const {
    if (k <= i) return std::nullopt;
    return k == i + 1 ? birth(i) : 0.0;
}

std::string BirthDeathGenerator::describe() const {
    if (birth_.size() == 1 && death_.size() == 1) {
        return "birth-death process (lambda=" + num(birth_[0]) + ", mu=" + num(death_[0]) + ")";
    }
    return "birth-death process (" + std::to_string(birth_.size()) + " birth rates, " +
           std::to_string(death_.size()) + " death rates)";
}

// ---------------------------------------------------------------- generator from kernel

GeneratorFromKernel::GeneratorFromKernel(std::shared_ptr<const TransitionKernel> kernel,
                                         std::function<double(State)> rate)
    : kernel_(std::move(kernel)), rate_(std::move(rate)) {
    if (!kernel_) throw DomainError("generator needs a kernel");
}

double GeneratorFromKernel::leave_probability(State i) const {
    std::vector<Entry> r;
    NeumaierSum s;
    if (kernel_->finite_rows()) {
        kernel_->row(i, kNoLimit, r);
        for (const Entry& e : r) {
            if (e.col != i) s.add(e.value);
        }
        return s.get();
    }
    auto tail = kernel_->analytic_tail(i, i + 1);
    if (!tail) throw CapabilityError("infinite kernel rows need a tail-sum oracle");
    if (i > 0) {
        kernel_->row(i, i - 1, r);
        for (const Entry& e : r) s.add(e.value);
    }
    s.add(*tail);
    return s.get();
}

void GeneratorFromKernel::row(State i, State max_col, std::vector<Entry>& out) const {
    kernel_->row(i, max_col, out);
    const double r = rate(i);
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("holding rates must be positive and finite");
    bool has_diag = false;
    for (Entry& e : out) {
        if (e.col == i) {
            e.value = -r * leave_probability(i);
            has_diag = true;
        } else {
            e.value *= r;
        }
    }
    if (!has_diag && i <= max_col) {
        const auto pos = std::find_if(out.begin(), out.end(), [&](const Entry& e) { return e.col > i; });
        out.insert(pos, Entry{i, -r * leave_probability(i)});
    }
}

std::optional<double> GeneratorFromKernel::analytic_tail(State i, State k) const {
    auto t = kernel_->analytic_tail(i, k);
    if (!t) return std::nullopt;
    return rate(i) * *t;
}

std::string GeneratorFromKernel::describe() const {
    return std::string(rate_ ? "rate-scaled" : "unit-rate") + " generator of " + kernel_->describe();
}

// ---------------------------------------------------------------- closed forms

CostFunction gim1_example_cost(double z) {
    require_z(z);
    return CostFunction::geometric(1.0 / z);
}

double gim1_closed_potential(double z, State i) {
    if (!(z > 2.0)) throw RegimeError("GI/M/1 closed-form potential needs z > 2");
    return z / ((z - 2.0) * ipow(z - 1.0, static_cast<double>(i)));
}

double gim1_closed_f(double z, State i, State n) {
    require_z(z);
    if (n < i) throw DomainError("F_n^(i) needs n >= i");
    if (n == i) return 1.0;
    return 1.0 / (z * ipow(z - 1.0, static_cast<double>(n - i)));
}

double gim1_closed_term(double z, State m) {
    require_z(z);
    return z / ipow(z - 1.0, static_cast<double>(m + 1));
}

CostFunction mg1_example_cost(double z) {
    require_z(z);
    return CostFunction::geometric((z - 1.0) / z, 1.0, true);
}

namespace {
void require_mg1_transient(double z) {
    if (!(z > 1.0 && z < 2.0)) throw RegimeError("M/G/1 closed forms need 1 < z < 2");
}
} // namespace

double mg1_closed_potential(double z, State i) {
    require_mg1_transient(z);
    const double di = static_cast<double>(i);
    return (1.0 / (2.0 - z) - (z * z - z + 1.0) / ipow(z, di)) * ipow(z - 1.0, di - 1.0);
}

double mg1_closed_m(double z, State i) {
    require_mg1_transient(z);
    return ipow(z - 1.0, static_cast<double>(i)) / (2.0 - z);
}

double mg1_closed_delta(double z) {
    require_mg1_transient(z);
    return 1.0 / (z - 1.0);
}

double mg1_closed_h(double z, State m, State i) {
    require_z(z);
    if (m > i) throw DomainError("H_m^(i) needs m <= i");
    if (m == i) return 1.0;
    return 1.0 / (z * ipow(z - 1.0, static_cast<double>(i - m)));
}

double mg1_closed_denominator(double z, State n) {
    require_z(z);
    if (n < 1) throw DomainError("denominator sum needs n >= 1");
    return 1.0 / (z * ipow(z - 1.0, static_cast<double>(n) - 1.0));
}

double mg1_closed_numerator(double z, State i, State n) {
    require_z(z);
    if (z == 2.0) throw RegimeError("numerator closed form needs z != 2");
    if (n <= i) throw DomainError("numerator sum needs n > i");
    const double d = static_cast<double>(n - i);
    return (ipow(z - 1.0, d + 1.0) - 1.0) / (z * (z - 2.0) * ipow(z - 1.0, d - 1.0));
}

double mg1_closed_lemma_tail(double z, State m) {
    require_z(z);
    if (m < 1) throw DomainError("lemma tail needs m >= 1");
    const double dm = static_cast<double>(m);
    return ipow(z - 1.0, dm - 2.0) / ipow(z, dm) + ipow((z - 1.0) / z, dm - 1.0);
}

double birth_death_closed_potential(double lambda, double mu, State i) {
    if (!(lambda > mu && mu > 0.0)) throw RegimeError("birth-death closed form needs lambda > mu > 0");
    return ipow(mu / lambda, static_cast<double>(i)) / (lambda - mu);
}

// ---------------------------------------------------------------- finite matrices

FiniteModel finite_model_from_dense(std::vector<std::vector<double>> dense) {
    const std::size_t n = dense.size();
    if (n == 0) throw FormatError("matrix is empty");
    bool generator = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (dense[i].size() != n) {
            throw FormatError("matrix is not square: row " + std::to_string(i) + " has " +
                              std::to_string(dense[i].size()) + " entries, expected " + std::to_string(n));
        }
        if (dense[i][i] < 0.0) generator = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        NeumaierSum s;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = dense[i][j];
            if (!std::isfinite(v)) throw FormatError("non-finite entry in row " + std::to_string(i));
            if (generator ? (j != i && v < 0.0) : (v < 0.0 || v > 1.0)) {
                throw FormatError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") out of range");
            }
            s.add(v);
        }
        const double target = generator ? 0.0 : 1.0;
        if (std::fabs(s.get() - target) > 1e-9) {
            throw FormatError(std::string(generator ? "generator row " : "row ") + std::to_string(i) +
                              " sums to " + num(s.get()) + ", expected " + num(target));
        }
    }
    if (generator) return std::make_shared<FiniteGenerator>(std::move(dense));
    return std::make_shared<FiniteKernel>(std::move(dense));
}

FiniteModel load_finite_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open matrix file " + path.string());
    std::vector<std::vector<double>> dense;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            std::size_t b = line.find_first_not_of(" \t", pos);
            std::size_t e = line.find_last_not_of(" \t", comma == 0 ? 0 : comma - 1);
            if (b == std::string::npos || b >= comma || e < b) {
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": empty field");
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e + 1, v);
            if (ec != std::errc() || ptr != line.data() + e + 1) {
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                                  line.substr(b, e + 1 - b) + "'");
            }
            row.push_back(v);
            pos = comma + 1;
        }
        dense.push_back(std::move(row));
    }
    return finite_model_from_dense(std::move(dense));
}

} // namespace skipfree
