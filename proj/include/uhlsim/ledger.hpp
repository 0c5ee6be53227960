#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace uhlsim {

/// Per-run accounting of oracle queries, state samples, and channel uses,
/// checked against recorded closed-form bounds. One ledger per experiment
/// instance; not shared across concurrent runs. Counts are doubles: exact
/// integers up to 2^53, and beyond that the closed-form products themselves
/// (deeply composed sample formulas overflow 64-bit integers).
class ResourceLedger {
public:
    struct Entry {
        double count = 0.0;
        double bound = -1.0;     // < 0: no bound recorded
        std::string formula;     // human-readable bound provenance
    };

    void charge(const std::string& counter, double n) {
        if (n < 0) throw std::invalid_argument("ledger: negative charge");
        entries_[counter].count += n;
    }

    void record_bound(const std::string& counter, double bound, std::string formula) {
        Entry& e = entries_[counter];
        e.bound = bound;
        e.formula = std::move(formula);
    }

    double count(const std::string& counter) const {
        auto it = entries_.find(counter);
        return it == entries_.end() ? 0.0 : it->second.count;
    }

    bool has(const std::string& counter) const { return entries_.count(counter) > 0; }

    /// Every counter with a recorded bound must satisfy count <= bound.
    bool within_bounds() const {
        for (const auto& [name, e] : entries_)
            if (e.bound >= 0.0 && e.count > e.bound) return false;
        return true;
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

}  // namespace uhlsim
