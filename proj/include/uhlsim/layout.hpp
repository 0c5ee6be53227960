#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uhlsim {

using Index = std::int64_t;

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant index (standard Kronecker order).
class DimLayout {
public:
    struct Factor {
        std::string label;
        Index dim = 1;
    };

    DimLayout() = default;
    DimLayout(std::initializer_list<Factor> fs) : factors_(fs) { validate(); }
    explicit DimLayout(std::vector<Factor> fs) : factors_(std::move(fs)) { validate(); }

    static DimLayout single(const std::string& label, Index dim) {
        return DimLayout({Factor{label, dim}});
    }

    Index dim() const {
        Index d = 1;
        for (const auto& f : factors_) d *= f.dim;
        return d;
    }

    std::size_t size() const { return factors_.size(); }
    const Factor& factor(std::size_t i) const { return factors_.at(i); }
    const std::vector<Factor>& factors() const { return factors_; }

    bool has(const std::string& label) const {
        for (const auto& f : factors_)
            if (f.label == label) return true;
        return false;
    }

    std::size_t position(const std::string& label) const {
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].label == label) return i;
        throw std::invalid_argument("DimLayout: unknown label '" + label + "'");
    }

    Index dim_of(const std::string& label) const { return factors_[position(label)].dim; }

    DimLayout& append(const std::string& label, Index dim) {
        if (dim < 1) throw std::invalid_argument("DimLayout: dimension must be >= 1");
        if (has(label)) throw std::invalid_argument("DimLayout: duplicate label '" + label + "'");
        factors_.push_back({label, dim});
        return *this;
    }

    /// Layout with the named factors removed, order of the rest preserved.
    DimLayout without(const std::vector<std::string>& labels) const {
        DimLayout out;
        for (const auto& f : factors_) {
            bool drop = false;
            for (const auto& l : labels)
                if (f.label == l) drop = true;
            if (!drop) out.factors_.push_back(f);
        }
        return out;
    }

    DimLayout tensor(const DimLayout& other) const {
        DimLayout out = *this;
        for (const auto& f : other.factors_) out.append(f.label, f.dim);
        return out;
    }

    bool operator==(const DimLayout& other) const {
        if (factors_.size() != other.factors_.size()) return false;
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].label != other.factors_[i].label ||
                factors_[i].dim != other.factors_[i].dim)
                return false;
        return true;
    }
    bool operator!=(const DimLayout& other) const { return !(*this == other); }

    bool same_dims(const DimLayout& other) const {
        if (factors_.size() != other.factors_.size()) return false;
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].dim != other.factors_[i].dim) return false;
        return true;
    }

    std::string to_string() const {
        std::string s;
        for (const auto& f : factors_) {
            if (!s.empty()) s += "*";
            s += f.label + "(" + std::to_string(f.dim) + ")";
        }
        return s.empty() ? "scalar" : s;
    }

private:
    void validate() const {
        for (const auto& f : factors_)
            if (f.dim < 1) throw std::invalid_argument("DimLayout: dimension must be >= 1");
    }

    std::vector<Factor> factors_;
};

}  // namespace uhlsim
