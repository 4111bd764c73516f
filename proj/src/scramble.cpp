#include "chaoslink/scramble.hpp"

#include "chaoslink/errors.hpp"

#include <cmath>

namespace chaoslink {

InvertibleOperator additive_operator() {
    return {"additive", [](double x, double i) { return x + i; },
            [](double z, double y) { return z - y; }};
}

InvertibleOperator multiplicative_operator() {
    return {"multiplicative", [](double x, double i) { return x * (1.0 + i); },
            [](double z, double y) {
                double den = y;
                if (std::abs(den) < kMultiplicativeGuard) {
                    den = std::signbit(y) ? -kMultiplicativeGuard : kMultiplicativeGuard;
                }
                return z / den - 1.0;
            }};
}

OperatorRegistry::OperatorRegistry() {
    add(additive_operator());
    add(multiplicative_operator());
}

void OperatorRegistry::add(InvertibleOperator op) {
    if (op.name.empty()) {
        throw ParameterError("operator name must not be empty");
    }
    if (!op.forward || !op.recover) {
        throw ParameterError("operator '" + op.name + "' needs both forward and recover");
    }
    if (ops_.contains(op.name)) {
        throw ParameterError("operator '" + op.name + "' is already registered");
    }
    auto name = op.name;
    ops_.emplace(std::move(name), std::move(op));
}

const InvertibleOperator& OperatorRegistry::get(const std::string& name) const {
    auto it = ops_.find(name);
    if (it == ops_.end()) {
        std::string known;
        for (const auto& [key, _] : ops_) {
            known += known.empty() ? key : ", " + key;
        }
        throw ConfigError("unknown operator '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

std::vector<std::string> OperatorRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : ops_) {
        out.push_back(key);
    }
    return out;
}

const OperatorRegistry& OperatorRegistry::builtin() {
    static const OperatorRegistry registry;
    return registry;
}

std::vector<std::uint8_t> threshold_detect(std::span<const double> symbols, std::size_t hold,
                                           double threshold) {
    if (hold == 0) {
        throw ParameterError("hold must be at least 1");
    }
    if (symbols.size() % hold != 0) {
        throw LengthError("symbol count " + std::to_string(symbols.size()) +
                          " is not a multiple of hold " + std::to_string(hold));
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() / hold);
    for (std::size_t start = 0; start < symbols.size(); start += hold) {
        double sum = 0.0;
        for (std::size_t j = 0; j < hold; ++j) {
            sum += symbols[start + j];
        }
        bits.push_back(sum / static_cast<double>(hold) > threshold ? 1 : 0);
    }
    return bits;
}

} // namespace chaoslink
