#include "avgrl/qtable.hpp"

#include "avgrl/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avgrl {

QTable::QTable(std::size_t states, std::size_t choices, std::vector<double> values)
    : states_(states), choices_(choices), values_(std::move(values)) {
    if (values_.size() != states_ * choices_) throw Error(ErrorKind::ConfigInvalid, "q table has wrong size");
}

double QTable::row_max(std::size_t s) const { return values_[pair(s, argmax(s))]; }

std::size_t QTable::argmax(std::size_t s) const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < choices_; ++a)
        if (values_[pair(s, a)] > values_[pair(s, best)]) best = a;
    return best;
}

double QTable::sum() const {
    double total = 0.0;
    for (double v : values_) total += v;
    return total;
}

double QTable::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool QTable::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

QTable QTable::shifted(double c) const {
    QTable out = *this;
    for (double& v : out.values_) v += c;
    return out;
}

QTable midpoint(const QTable& a, const QTable& b) {
    QTable out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * a[i] + 0.5 * b[i];
    return out;
}

double sup_distance(const QTable& a, const QTable& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ReferenceFunction::ReferenceFunction(Kind kind, std::vector<double> weights, std::size_t entry)
    : kind_(kind), weights_(std::move(weights)), entry_(entry), u_(0.0) {
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(ErrorKind::ConfigInvalid, "reference weights must be finite and nonnegative");
        u_ += w;
    }
    if (!(u_ > 0.0)) throw Error(ErrorKind::ConfigInvalid, "reference weights must have positive total");
}

ReferenceFunction ReferenceFunction::entry(std::size_t num_pairs, std::size_t pair) {
    if (pair >= num_pairs) throw Error(ErrorKind::ConfigInvalid, "reference entry out of range");
    std::vector<double> w(num_pairs, 0.0);
    w[pair] = 1.0;
    return {Kind::Entry, std::move(w), pair};
}

ReferenceFunction ReferenceFunction::weighted(std::vector<double> weights) {
    return {Kind::Weighted, std::move(weights), 0};
}

ReferenceFunction ReferenceFunction::sum(std::size_t num_pairs) {
    return {Kind::Sum, std::vector<double>(num_pairs, 1.0), 0};
}

ReferenceFunction ReferenceFunction::mean(std::size_t num_pairs) {
    return {Kind::Mean, std::vector<double>(num_pairs, 1.0 / static_cast<double>(num_pairs)), 0};
}

double ReferenceFunction::operator()(std::span<const double> q) const {
    if (q.size() != weights_.size()) throw Error(ErrorKind::ConfigInvalid, "reference function size mismatch");
    switch (kind_) {
    case Kind::Entry: return q[entry_];
    case Kind::Sum: {
        double total = 0.0;
        for (double v : q) total += v;
        return total;
    }
    default: {
        double total = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) total += weights_[i] * q[i];
        return total;
    }
    }
}

double ReferenceFunction::operator()(const QTable& q) const { return (*this)(q.values()); }

std::string ReferenceFunction::describe() const {
    switch (kind_) {
    case Kind::Entry: return "entry:" + std::to_string(entry_);
    case Kind::Sum: return "sum";
    case Kind::Mean: return "mean";
    case Kind::Weighted: {
        std::ostringstream out;
        out << "weights:";
        for (std::size_t i = 0; i < weights_.size(); ++i) out << (i ? "," : "") << weights_[i];
        return out.str();
    }
    }
    return "unknown";
}

ReferenceFunction parse_reference_function(const std::string& spec, std::size_t num_pairs) {
    if (spec == "sum") return ReferenceFunction::sum(num_pairs);
    if (spec == "mean") return ReferenceFunction::mean(num_pairs);
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
        if (kind == "entry") return ReferenceFunction::entry(num_pairs, std::stoul(rest));
        if (kind == "weights") {
            std::vector<double> w;
            std::stringstream in(rest);
            for (std::string item; std::getline(in, item, ',');) w.push_back(std::stod(item));
            if (w.size() != num_pairs) throw Error(ErrorKind::ConfigInvalid, "weight count does not match pairs");
            return ReferenceFunction::weighted(std::move(w));
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::ConfigInvalid, "malformed reference function '" + spec + "'");
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown reference function '" + spec + "'");
}

} // namespace avgrl
