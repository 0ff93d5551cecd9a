#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace avgrl {

/// Value estimates indexed by (state, action) or (state, option) pairs,
/// stored row-major so pair (s, a) lives at s * cols() + a.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t choices, double fill = 0.0)
        : states_(states), choices_(choices), values_(states * choices, fill) {}
    QTable(std::size_t states, std::size_t choices, std::vector<double> values);

    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_choices() const noexcept { return choices_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t pair(std::size_t s, std::size_t a) const noexcept { return s * choices_ + a; }

    double& operator()(std::size_t s, std::size_t a) { return values_[pair(s, a)]; }
    double operator()(std::size_t s, std::size_t a) const { return values_[pair(s, a)]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double row_max(std::size_t s) const;
    /// Lowest index among maximizers.
    std::size_t argmax(std::size_t s) const;
    double sum() const;
    double sup_norm() const;
    bool all_finite() const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    QTable shifted(double c) const;

    bool operator==(const QTable&) const = default;

private:
    std::size_t states_ = 0;
    std::size_t choices_ = 0;
    std::vector<double> values_;
};

QTable midpoint(const QTable& a, const QTable& b);
double sup_distance(const QTable& a, const QTable& b);

/**
 * Nonnegative linear reference functional f(q) = sum_i w_i q_i with
 * u = f(e) = sum_i w_i > 0. Linearity with nonnegative weights gives the
 * required Lipschitz bound, f(q + c e) = f(q) + c u and f(c q) = c f(q).
 */
class ReferenceFunction {
public:
    enum class Kind { Entry, Weighted, Sum, Mean };

    static ReferenceFunction entry(std::size_t num_pairs, std::size_t pair);
    static ReferenceFunction weighted(std::vector<double> weights);
    static ReferenceFunction sum(std::size_t num_pairs);
    static ReferenceFunction mean(std::size_t num_pairs);

    double operator()(const QTable& q) const;
    double operator()(std::span<const double> q) const;

    /// f(e), the functional's value on the all-ones vector.
    double u() const noexcept { return u_; }
    Kind kind() const noexcept { return kind_; }
    std::size_t num_pairs() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    std::string describe() const;

private:
    ReferenceFunction(Kind kind, std::vector<double> weights, std::size_t entry);

    Kind kind_;
    std::vector<double> weights_;
    std::size_t entry_;
    double u_;
};

/// Parses "sum", "mean", "entry:<pair>" or "weights:w0,w1,...".
ReferenceFunction parse_reference_function(const std::string& spec, std::size_t num_pairs);

} // namespace avgrl
