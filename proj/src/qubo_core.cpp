#include "chainopt/qubo_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chainopt {

namespace {

std::vector<std::vector<Neighbor>> build_adjacency(std::size_t n, const std::vector<Coupling>& couplings) {
    std::vector<std::vector<Neighbor>> adj(n);
    for (const Coupling& c : couplings) {
        adj[c.i].push_back(Neighbor{c.j, c.value});
        adj[c.j].push_back(Neighbor{c.i, c.value});
    }
    return adj;
}

void check_length(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw std::invalid_argument("state length " + std::to_string(got) + " does not match model size " +
                                    std::to_string(expected));
    }
}

}  // namespace

Qubo Qubo::from_triplets(std::size_t n, std::vector<Coupling> triplets, std::vector<double> linear, double offset) {
    if (linear.size() != n) {
        throw std::invalid_argument("linear term vector has wrong length");
    }
    Qubo q;
    q.linear_ = std::move(linear);
    q.offset_ = offset;
    for (Coupling& t : triplets) {
        if (t.i >= n || t.j >= n) {
            throw std::out_of_range("coupling index out of range");
        }
        if (t.i > t.j) {
            std::swap(t.i, t.j);
        }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Coupling& a, const Coupling& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t s = 0; s < triplets.size();) {
        std::size_t e = s;
        double sum = 0.0;
        while (e < triplets.size() && triplets[e].i == triplets[s].i && triplets[e].j == triplets[s].j) {
            sum += triplets[e].value;
            ++e;
        }
        if (triplets[s].i == triplets[s].j) {
            q.linear_[triplets[s].i] += sum;
        } else if (sum != 0.0) {
            q.quadratic_.push_back(Coupling{triplets[s].i, triplets[s].j, sum});
        }
        s = e;
    }
    q.adjacency_ = build_adjacency(n, q.quadratic_);
    return q;
}

double Qubo::energy(const BitVector& x) const {
    check_length(size(), x.size());
    long double e = offset_;
    for (std::size_t i = 0; i < linear_.size(); ++i) {
        if (x[i]) {
            e += linear_[i];
        }
    }
    for (const Coupling& c : quadratic_) {
        if (x[c.i] && x[c.j]) {
            e += c.value;
        }
    }
    return static_cast<double>(e);
}

double Qubo::flip_delta(const BitVector& x, std::size_t i) const {
    double field = linear_[i];
    for (const Neighbor& nb : adjacency_[i]) {
        if (x[nb.index]) {
            field += nb.value;
        }
    }
    return x[i] ? -field : field;
}

double Qubo::max_abs_coefficient() const {
    double m = 0.0;
    for (double a : linear_) {
        m = std::max(m, std::abs(a));
    }
    for (const Coupling& c : quadratic_) {
        m = std::max(m, std::abs(c.value));
    }
    return m;
}

Ising::Ising(std::vector<double> h, std::vector<Coupling> couplings, double offset)
    : h_(std::move(h)), couplings_(std::move(couplings)), offset_(offset) {
    adjacency_ = build_adjacency(h_.size(), couplings_);
}

double Ising::energy(const SpinVector& s) const {
    check_length(size(), s.size());
    long double e = offset_;
    for (std::size_t i = 0; i < h_.size(); ++i) {
        e += h_[i] * s[i];
    }
    for (const Coupling& c : couplings_) {
        e += c.value * s[c.i] * s[c.j];
    }
    return static_cast<double>(e);
}

double Ising::local_field(const std::vector<double>& m, std::size_t i) const {
    double f = h_[i];
    for (const Neighbor& nb : adjacency_[i]) {
        f += nb.value * m[nb.index];
    }
    return f;
}

double Ising::local_field(const SpinVector& s, std::size_t i) const {
    double f = h_[i];
    for (const Neighbor& nb : adjacency_[i]) {
        f += nb.value * s[nb.index];
    }
    return f;
}

double Ising::max_row_sum() const {
    double m = 0.0;
    for (std::size_t i = 0; i < h_.size(); ++i) {
        double row = std::abs(h_[i]);
        for (const Neighbor& nb : adjacency_[i]) {
            row += std::abs(nb.value);
        }
        m = std::max(m, row);
    }
    return m;
}

Ising to_ising(const Qubo& q) {
    const std::size_t n = q.size();
    std::vector<double> h(n, 0.0);
    long double offset = q.offset();
    for (std::size_t i = 0; i < n; ++i) {
        h[i] += q.linear()[i] / 2.0;
        offset += q.linear()[i] / 2.0;
    }
    std::vector<Coupling> couplings;
    couplings.reserve(q.quadratic().size());
    for (const Coupling& c : q.quadratic()) {
        const double quarter = c.value / 4.0;
        couplings.push_back(Coupling{c.i, c.j, quarter});
        h[c.i] += quarter;
        h[c.j] += quarter;
        offset += quarter;
    }
    return Ising(std::move(h), std::move(couplings), static_cast<double>(offset));
}

SpinVector to_spins(const BitVector& x) {
    SpinVector s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        s[i] = x[i] ? 1 : -1;
    }
    return s;
}

BitVector to_bits(const SpinVector& s) {
    BitVector x(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = s[i] > 0 ? 1 : 0;
    }
    return x;
}

}  // namespace chainopt
