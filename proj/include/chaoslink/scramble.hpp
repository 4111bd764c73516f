#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace chaoslink {

/// An invertible composition of drive state and information symbol.
/// recover(forward(x, i), x) == i must hold for every x in the basin.
struct InvertibleOperator {
    std::string name;
    std::function<double(double x, double i)> forward;
    std::function<double(double z, double y)> recover;
};

/// z = x + i, i^ = z - y
InvertibleOperator additive_operator();

/// z = x (1 + i), i^ = z / y - 1. |y| is floored at kMultiplicativeGuard.
InvertibleOperator multiplicative_operator();

inline constexpr double kMultiplicativeGuard = 1e-12;

/// Name-keyed set of operators; starts with "additive" and "multiplicative".
class OperatorRegistry {
  public:
    OperatorRegistry();

    /// Throws ParameterError on a duplicate or empty name, or missing functions.
    void add(InvertibleOperator op);
    /// Throws ConfigError for an unknown name.
    const InvertibleOperator& get(const std::string& name) const;
    bool contains(const std::string& name) const { return ops_.contains(name); }
    std::vector<std::string> names() const;

    static const OperatorRegistry& builtin();

  private:
    std::map<std::string, InvertibleOperator> ops_;
};

struct InfoSymbol {
    double value;
};

struct MaskedSample {
    double z;
};

inline MaskedSample scramble(double x, InfoSymbol i, const InvertibleOperator& op) {
    return {op.forward(x, i.value)};
}

/// epsilon := y - z
inline double epsilon(double y, MaskedSample z) noexcept { return y - z.z; }

inline double recover_symbol(MaskedSample z, double y, const InvertibleOperator& op) {
    return op.recover(z.z, y);
}

/// Averages consecutive blocks of `hold` estimates and emits 1 where the block
/// mean exceeds `threshold`. Throws LengthError unless hold divides the length.
std::vector<std::uint8_t> threshold_detect(std::span<const double> symbols, std::size_t hold,
                                           double threshold);

} // namespace chaoslink
