#include "chainopt/subproblem.hpp"

#include <stdexcept>

namespace chainopt {

SubProblem build_subproblem(const Qubo& q, const BitVector& x, const std::vector<std::size_t>& selected,
                            const VariableLayout* layout) {
    const std::size_t n = q.size();
    if (x.size() != n) {
        throw std::invalid_argument("state length does not match the model");
    }
    if (selected.empty()) {
        throw std::invalid_argument("sub-problem selection is empty");
    }
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> local(n, npos);
    SubProblem sub;
    for (std::size_t v : selected) {
        if (v >= n || local[v] != npos) {
            throw std::invalid_argument("selection must list distinct variables of the model");
        }
        local[v] = sub.vars.size();
        sub.vars.push_back(v);
    }
    std::vector<double> linear(sub.vars.size(), 0.0);
    long double offset = q.offset();
    for (std::size_t v = 0; v < n; ++v) {
        if (local[v] != npos) {
            linear[local[v]] += q.linear()[v];
        } else if (x[v]) {
            offset += q.linear()[v];
        }
    }
    std::vector<Coupling> inner;
    for (const Coupling& c : q.quadratic()) {
        const std::size_t li = local[c.i], lj = local[c.j];
        if (li != npos && lj != npos) {
            inner.push_back(Coupling{static_cast<std::uint32_t>(li), static_cast<std::uint32_t>(lj), c.value});
        } else if (li != npos) {
            if (x[c.j]) {
                linear[li] += c.value;
            }
        } else if (lj != npos) {
            if (x[c.i]) {
                linear[lj] += c.value;
            }
        } else if (x[c.i] && x[c.j]) {
            offset += c.value;
        }
    }
    const std::size_t m = sub.vars.size();
    sub.problem.qubo = Qubo::from_triplets(m, std::move(inner), std::move(linear), static_cast<double>(offset));
    if (layout) {
        for (const auto& g : layout->groups()) {
            std::vector<std::size_t> members;
            for (std::size_t v : g) {
                if (local[v] != npos) {
                    members.push_back(local[v]);
                }
            }
            if (!members.empty()) {
                sub.problem.groups.push_back(std::move(members));
            }
        }
    }
    return sub;
}

BitVector restrict_to(const SubProblem& sub, const BitVector& x) {
    BitVector out(sub.vars.size());
    for (std::size_t l = 0; l < sub.vars.size(); ++l) {
        out[l] = x[sub.vars[l]];
    }
    return out;
}

BitVector merge_subsolution(const SubProblem& sub, BitVector x, const BitVector& local) {
    if (local.size() != sub.vars.size()) {
        throw std::invalid_argument("sub-solution length does not match the selection");
    }
    for (std::size_t l = 0; l < sub.vars.size(); ++l) {
        x[sub.vars[l]] = local[l];
    }
    return x;
}

}  // namespace chainopt
