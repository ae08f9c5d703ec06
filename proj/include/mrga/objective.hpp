#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>

#include "mrga/errors.hpp"

namespace mrga {

/// Names an objective function together with its search domain.
struct ObjectiveSpec {
    std::string name = "sphere";
    std::uint32_t dimension = 0;
    double lower_bound = -100.0;
    double upper_bound = 100.0;

    void validate() const {
        if (dimension < 1) throw ConfigError("objective dimension must be >= 1");
        if (!(lower_bound < upper_bound))
            throw ConfigError("objective bounds require lower_bound < upper_bound");
    }
};

/// Sum of squared genes. Accumulated in index-ascending order so results
/// are bit-reproducible; minimum 0 at the origin.
inline double sphere(std::span<const double> genes) {
    if (genes.empty()) throw ConfigError("sphere: empty gene sequence");
    double sum = 0.0;
    for (double g : genes) sum += g * g;
    return sum;
}

/// A pure fitness function bound to a concrete spec. Minimization
/// convention throughout.
class Objective {
public:
    using Fn = std::function<double(std::span<const double>)>;

    Objective() = default;
    Objective(ObjectiveSpec spec, Fn fn) : spec_(std::move(spec)), fn_(std::move(fn)) {}

    const ObjectiveSpec& spec() const { return spec_; }

    double operator()(std::span<const double> genes) const {
        if (genes.size() != spec_.dimension)
            throw ConfigError("objective: gene count " + std::to_string(genes.size()) +
                              " does not match dimension " + std::to_string(spec_.dimension));
        return fn_(genes);
    }

private:
    ObjectiveSpec spec_;
    Fn fn_;
};

namespace detail {

inline const std::map<std::string, Objective::Fn>& objective_registry() {
    static const std::map<std::string, Objective::Fn> registry = {
        {"sphere", [](std::span<const double> g) { return sphere(g); }},
    };
    return registry;
}

}  // namespace detail

/// Resolves a spec to a callable objective. Unknown names list what is
/// registered.
inline Objective lookup_objective(const ObjectiveSpec& spec) {
    spec.validate();
    const auto& registry = detail::objective_registry();
    auto it = registry.find(spec.name);
    if (it == registry.end()) {
        std::ostringstream msg;
        msg << "unknown objective '" << spec.name << "'; registered:";
        for (const auto& [name, fn] : registry) msg << ' ' << name;
        throw ConfigError(msg.str());
    }
    return Objective(spec, it->second);
}

}  // namespace mrga
