#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace barriermc {

// Ordered set of named scalar parameters; the differentiation inputs.
// Names are unique, layouts are fixed for the duration of a run, so hot
// loops address components by index.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::initializer_list<std::pair<std::string, double>> items) {
        for (const auto& [name, value] : items) add(name, value);
    }

    void add(std::string name, double value) {
        if (index_of(name) >= 0) {
            throw std::invalid_argument("ParamVector: duplicate component '" + name + "'");
        }
        names_.push_back(std::move(name));
        values_.push_back(value);
    }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    int require(std::string_view name) const {
        const int idx = index_of(name);
        if (idx < 0) {
            throw std::out_of_range("ParamVector: unknown component '" + std::string(name) + "'");
        }
        return idx;
    }

    double value(int index) const { return values_[static_cast<std::size_t>(index)]; }
    double get(std::string_view name) const { return value(require(name)); }
    void set(std::string_view name, double v) { values_[static_cast<std::size_t>(require(name))] = v; }
    void set(int index, double v) { values_[static_cast<std::size_t>(index)] = v; }

    ParamVector bumped(int index, double dv) const {
        ParamVector out = *this;
        out.values_[static_cast<std::size_t>(index)] += dv;
        return out;
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(int index) const { return names_[static_cast<std::size_t>(index)]; }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::vector<double> values_;
};

}  // namespace barriermc
