#pragma once

#include <optional>
#include <span>
#include <string>

#include "rcga/errors.hpp"

namespace rcga {

// Sum of all component values; the truly multi-valued benchmark. Maximum is
// n*(r-1), attained only by the all-(r-1) vector.
inline long long g_onemax(std::span<const int> x, int r) {
    long long sum = 0;
    for (int v : x) {
        if (v < 0 || v >= r) throw invalid_parameter("g_onemax: component outside [0, r-1]");
        sum += v;
    }
    return sum;
}

// Counts components equal to r-1; all other values contribute nothing, so the
// function is quasi-binary. Maximum is n.
inline long long r_onemax(std::span<const int> x, int r) {
    long long count = 0;
    for (int v : x) {
        if (v < 0 || v >= r) throw invalid_parameter("r_onemax: component outside [0, r-1]");
        count += (v == r - 1);
    }
    return count;
}

// Neutral objective: every individual ties, so every update is pure noise.
inline long long constant_fitness(std::span<const int>) { return 0; }

enum class ObjectiveKind { g_onemax, r_onemax, constant };

// Named objective with its known optimum, so runs can detect success and
// configuration files can refer to objectives by their canonical names.
struct Objective {
    ObjectiveKind kind = ObjectiveKind::g_onemax;
    int n = 0;
    int r = 0;
    std::optional<long long> optimum; // absent for the constant objective

    static Objective make(ObjectiveKind kind, int n, int r) {
        if (n < 1) throw invalid_parameter("Objective: n must be >= 1");
        if (r < 2) throw invalid_parameter("Objective: r must be >= 2");
        Objective f;
        f.kind = kind;
        f.n = n;
        f.r = r;
        switch (kind) {
        case ObjectiveKind::g_onemax: f.optimum = static_cast<long long>(n) * (r - 1); break;
        case ObjectiveKind::r_onemax: f.optimum = n; break;
        case ObjectiveKind::constant: f.optimum = std::nullopt; break;
        }
        return f;
    }

    static Objective from_name(const std::string& name, int n, int r) {
        if (name == "g-onemax") return make(ObjectiveKind::g_onemax, n, r);
        if (name == "r-onemax") return make(ObjectiveKind::r_onemax, n, r);
        if (name == "constant") return make(ObjectiveKind::constant, n, r);
        throw invalid_parameter("unknown objective name: " + name);
    }

    const char* name() const {
        switch (kind) {
        case ObjectiveKind::g_onemax: return "g-onemax";
        case ObjectiveKind::r_onemax: return "r-onemax";
        case ObjectiveKind::constant: return "constant";
        }
        return "?";
    }

    long long evaluate(std::span<const int> x) const {
        switch (kind) {
        case ObjectiveKind::g_onemax: return g_onemax(x, r);
        case ObjectiveKind::r_onemax: return r_onemax(x, r);
        case ObjectiveKind::constant: return constant_fitness(x);
        }
        return 0;
    }
};

} // namespace rcga
