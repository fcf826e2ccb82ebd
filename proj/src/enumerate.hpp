#pragma once

// Exhaustive enumeration over a subset of spins, with the remaining spins
// minimized in closed form. The remaining ("free") spins must form an
// independent set: each only sees a local field from the enumerated spins,
// so its optimum is -|field|.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "chimera_sat/ising.hpp"

namespace chimera_sat::detail {

/// Greedy maximal independent set among `candidates` (indices into `dense`),
/// visiting low-degree vertices first. Zero couplings do not count as edges.
std::vector<int> greedy_independent_set(const DenseModel& dense, const std::vector<int>& candidates);

/// Incremental energy tracker over a DenseModel whose first `num_enumerated`
/// vertices are enumerated and whose remaining vertices are free.
class SplitEnumerator {
   public:
    SplitEnumerator(const DenseModel& dense, int num_enumerated)
        : dense_(dense),
          n_enum_(num_enumerated),
          spins_(dense.size(), -1),
          free_fields_(dense.size() - num_enumerated, 0.0) {}

    int num_enumerated() const { return n_enum_; }
    int num_free() const { return static_cast<int>(free_fields_.size()); }

    /// Sets enumerated spin i to +1 iff bit i of `state` is set and recomputes
    /// everything exactly.
    void reset(uint64_t state) {
        state_ = state;
        for (int i = 0; i < n_enum_; ++i) {
            spins_[i] = ((state >> i) & 1) ? 1 : -1;
        }
        energy_ = dense_.offset();
        for (int i = 0; i < n_enum_; ++i) {
            double f = dense_.field(i);
            double pair = 0;
            for (const auto& nb : dense_.neighbors(i)) {
                if (nb.index < n_enum_ && nb.index > i) pair += nb.coupling * spins_[nb.index];
            }
            energy_ += spins_[i] * (f + pair);
        }
        for (int j = 0; j < num_free(); ++j) {
            const int v = n_enum_ + j;
            double f = dense_.field(v);
            for (const auto& nb : dense_.neighbors(v)) {
                f += nb.coupling * spins_[nb.index];
            }
            free_fields_[j] = f;
        }
        flips_since_reset_ = 0;
    }

    void flip(int i) {
        if (++flips_since_reset_ >= kRecomputeInterval) {
            reset(state_ ^ (uint64_t{1} << i));
            return;
        }
        const int8_t old = spins_[i];
        double local = dense_.field(i);
        for (const auto& nb : dense_.neighbors(i)) {
            if (nb.index < n_enum_) {
                local += nb.coupling * spins_[nb.index];
            } else {
                free_fields_[nb.index - n_enum_] -= 2.0 * nb.coupling * old;
            }
        }
        energy_ -= 2.0 * old * local;
        spins_[i] = static_cast<int8_t>(-old);
        state_ ^= uint64_t{1} << i;
    }

    uint64_t state() const { return state_; }
    double enumerated_energy() const { return energy_; }
    std::span<const double> free_fields() const { return free_fields_; }

    /// Minimum over the free spins given the enumerated ones.
    double reduced_energy() const {
        double e = energy_;
        for (double f : free_fields_) e -= std::fabs(f);
        return e;
    }

   private:
    static constexpr int kRecomputeInterval = 4096;

    const DenseModel& dense_;
    int n_enum_;
    std::vector<int8_t> spins_;
    std::vector<double> free_fields_;
    uint64_t state_ = 0;
    double energy_ = 0;
    int flips_since_reset_ = 0;
};

/// Gray code of i.
inline uint64_t gray(uint64_t i) { return i ^ (i >> 1); }

/// Index of the bit that changes between gray(i-1) and gray(i), i > 0.
inline int gray_flip_bit(uint64_t i) { return std::countr_zero(i); }

}  // namespace chimera_sat::detail
