#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace chainopt {

using BitVector = std::vector<std::uint8_t>;
using SpinVector = std::vector<std::int8_t>;

struct Coupling {
    std::uint32_t i = 0;
    std::uint32_t j = 0;  // i < j
    double value = 0.0;
};

struct Neighbor {
    std::uint32_t index = 0;
    double value = 0.0;
};

/// Q(x) = Σ_i a_i x_i + Σ_{i<j} b_ij x_i x_j + offset over binary x.
class Qubo {
public:
    Qubo() = default;
    explicit Qubo(std::size_t n) : linear_(n, 0.0), adjacency_(n) {}

    /// Triplets may repeat and be given in either order; diagonal entries become linear terms.
    static Qubo from_triplets(std::size_t n, std::vector<Coupling> triplets, std::vector<double> linear,
                              double offset);

    std::size_t size() const { return linear_.size(); }
    double offset() const { return offset_; }
    const std::vector<double>& linear() const { return linear_; }
    /// Upper-triangle couplings sorted row-major.
    const std::vector<Coupling>& quadratic() const { return quadratic_; }
    const std::vector<Neighbor>& neighbors(std::size_t i) const { return adjacency_[i]; }

    double energy(const BitVector& x) const;
    /// Q(x with bit i flipped) − Q(x).
    double flip_delta(const BitVector& x, std::size_t i) const;
    /// Largest |coefficient| over linear and quadratic terms.
    double max_abs_coefficient() const;

private:
    std::vector<double> linear_;
    std::vector<Coupling> quadratic_;
    std::vector<std::vector<Neighbor>> adjacency_;
    double offset_ = 0.0;
};

/// H(s) = Σ_{i<j} K_ij s_i s_j + Σ_i h_i s_i + offset over spins s ∈ {−1, 1}.
class Ising {
public:
    Ising() = default;
    Ising(std::vector<double> h, std::vector<Coupling> couplings, double offset);

    std::size_t size() const { return h_.size(); }
    const std::vector<double>& field() const { return h_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    const std::vector<Neighbor>& neighbors(std::size_t i) const { return adjacency_[i]; }
    double offset() const { return offset_; }

    double energy(const SpinVector& s) const;
    /// ∂H/∂s_i = Σ_j K_ij s_j + h_i, also valid for relaxed real-valued s.
    double local_field(const std::vector<double>& m, std::size_t i) const;
    double local_field(const SpinVector& s, std::size_t i) const;
    /// Largest Σ_j |K_ij| + |h_i| over rows; 0 for an empty model.
    double max_row_sum() const;

private:
    std::vector<double> h_;
    std::vector<Coupling> couplings_;
    std::vector<std::vector<Neighbor>> adjacency_;
    double offset_ = 0.0;
};

/// Substitutes x = (s + 1) / 2 so that H(s) equals Q(x).
Ising to_ising(const Qubo& q);

SpinVector to_spins(const BitVector& x);
BitVector to_bits(const SpinVector& s);

}  // namespace chainopt
