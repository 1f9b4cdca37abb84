#pragma once

// Subsets of the variable universe [n], stored as machine-word bit masks.
// Variables are 1-based everywhere in the public interface; bit i-1 of the
// mask holds variable i. The engine-wide cap n <= 62 keeps a set in one word.

#include "polybound/errors.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace polybound {

inline constexpr int kMaxVariables = 62;

class VarSet {
public:
    VarSet() = default;
    explicit VarSet(std::uint64_t bits) : bits_(bits) {}

    static VarSet empty() { return VarSet(); }
    static VarSet singleton(int v) { return VarSet(std::uint64_t(1) << (v - 1)); }
    static VarSet full(int n) {
        return n == 0 ? VarSet() : VarSet(~std::uint64_t(0) >> (64 - n));
    }
    static VarSet of(std::initializer_list<int> vars) {
        VarSet s;
        for (int v : vars)
            s = s.with(v);
        return s;
    }

    std::uint64_t bits() const { return bits_; }
    int size() const { return std::popcount(bits_); }
    bool empty_set() const { return bits_ == 0; }
    bool contains(int v) const { return (bits_ >> (v - 1)) & 1; }

    VarSet with(int v) const { return VarSet(bits_ | (std::uint64_t(1) << (v - 1))); }
    VarSet without(int v) const { return VarSet(bits_ & ~(std::uint64_t(1) << (v - 1))); }

    VarSet union_with(VarSet o) const { return VarSet(bits_ | o.bits_); }
    VarSet intersect(VarSet o) const { return VarSet(bits_ & o.bits_); }
    VarSet minus(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
    VarSet complement(int n) const { return VarSet(full(n).bits_ & ~bits_); }

    bool subset_of(VarSet o) const { return (bits_ & ~o.bits_) == 0; }
    bool proper_subset_of(VarSet o) const { return subset_of(o) && bits_ != o.bits_; }
    // I and J are incomparable: neither contains the other.
    bool incomparable_with(VarSet o) const { return !subset_of(o) && !o.subset_of(*this); }

    // Members in ascending order.
    std::vector<int> members() const {
        std::vector<int> out;
        out.reserve(size());
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            out.push_back(std::countr_zero(b) + 1);
        return out;
    }

    int min_member() const {
        if (bits_ == 0)
            throw InternalError("VarSet: min_member of empty set");
        return std::countr_zero(bits_) + 1;
    }

    friend bool operator==(VarSet a, VarSet b) { return a.bits_ == b.bits_; }
    friend bool operator!=(VarSet a, VarSet b) { return a.bits_ != b.bits_; }
    // Numeric mask order; the deterministic tie-break order used by the
    // flow-path extraction and all canonical serializations.
    friend bool operator<(VarSet a, VarSet b) { return a.bits_ < b.bits_; }

    // "{1,3,4}", "{}" for the empty set.
    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (int v : members()) {
            if (!first)
                s += ",";
            first = false;
            s += std::to_string(v);
        }
        return s + "}";
    }

private:
    std::uint64_t bits_ = 0;
};

// All subsets of [n] in mask order; only meaningful for small n.
inline std::vector<VarSet> all_subsets(int n) {
    std::vector<VarSet> out;
    out.reserve(std::size_t(1) << n);
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m)
        out.push_back(VarSet(m));
    return out;
}

}  // namespace polybound
