#include "chainopt/das.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "chainopt/util.hpp"

namespace chainopt {

namespace {

Eigen::VectorXd normal_vector(Rng& rng, std::size_t d) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(d);
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = nd(rng);
    }
    return v;
}

}  // namespace

DasState::DasState(std::vector<DasParam> space, DasConfig config) : space_(std::move(space)), config_(config) {
    const std::size_t d = space_.size();
    if (config_.samples < 2) {
        throw std::invalid_argument("DAS needs at least two samples per step");
    }
    theta_.resize(d);
    lo_.resize(d);
    hi_.resize(d);
    L_ = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const DasParam& p = space_[i];
        if (!(p.lo <= p.initial && p.initial <= p.hi) || p.spread <= 0.0 || (p.log_scale && p.lo <= 0.0)) {
            throw std::invalid_argument("invalid DAS parameter '" + p.name + "'");
        }
        lo_[i] = p.log_scale ? std::log(p.lo) : p.lo;
        hi_[i] = p.log_scale ? std::log(p.hi) : p.hi;
        theta_[i] = p.log_scale ? std::log(p.initial) : p.initial;
        L_(i, i) = p.spread;
    }
}

Eigen::VectorXd DasState::clamp(Eigen::VectorXd point) const {
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        point[i] = std::clamp(point[i], lo_[i], hi_[i]);
    }
    return point;
}

std::vector<double> DasState::to_params(const Eigen::VectorXd& point) const {
    std::vector<double> out(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
        const DasParam& p = space_[i];
        double v = p.log_scale ? std::exp(point[i]) : point[i];
        if (p.integer) {
            v = std::round(v);
        }
        out[i] = std::clamp(v, p.lo, p.hi);
    }
    return out;
}

std::vector<DasDraw> das_sample(const DasState& state) {
    Rng rng(derive_seed(state.config().seed, 2 * static_cast<std::uint64_t>(state.step())));
    std::vector<DasDraw> draws;
    const int r = state.config().samples;
    for (int k = 0; k < r; ++k) {
        DasDraw d;
        if (k % 2 == 1) {
            d.eps = -draws.back().eps;
        } else {
            d.eps = normal_vector(rng, state.dim());
        }
        d.point = state.clamp(state.theta() + state.L() * d.eps);
        d.params = state.to_params(d.point);
        draws.push_back(std::move(d));
    }
    return draws;
}

void das_update(DasState& s, const std::vector<DasDraw>& draws, const std::vector<double>& costs) {
    if (draws.size() != costs.size() || draws.empty()) {
        throw std::invalid_argument("DAS update needs one cost per draw");
    }
    const std::size_t d = s.dim();
    const double r = static_cast<double>(costs.size());
    double mean = 0.0;
    for (double c : costs) {
        mean += c;
    }
    mean /= r;
    double var = 0.0;
    for (double c : costs) {
        var += (c - mean) * (c - mean);
    }
    const double sd = std::sqrt(var / r);
    ++s.step_;
    if (d == 0) {
        return;
    }
    Rng rng(derive_seed(s.config_.seed, 2 * static_cast<std::uint64_t>(s.step_) + 1));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    if (sd > 1e-15 * std::max(1.0, std::abs(mean))) {
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
        for (std::size_t k = 0; k < draws.size(); ++k) {
            const double c = (costs[k] - mean) / sd;
            g += c * draws[k].eps;
            M += c * (draws[k].eps * draws[k].eps.transpose() - I);
        }
        g /= r;
        M /= r;
    }
    const DasConfig& cfg = s.config_;
    Eigen::VectorXd step = -cfg.alpha_theta * (s.L_ * g);
    if (cfg.eta_theta > 0.0) {
        step += cfg.eta_theta * (s.L_ * normal_vector(rng, d));
    }
    s.theta_ = s.clamp(s.theta_ + step);

    // L ← L expm(−α_L M / 2), symmetric exponential through the eigendecomposition
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-0.5 * cfg.alpha_L * M);
    const Eigen::MatrixXd expm =
        eig.eigenvectors() * eig.eigenvalues().array().exp().matrix().asDiagonal() * eig.eigenvectors().transpose();
    Eigen::MatrixXd L = s.L_ * expm * std::exp(cfg.alpha_L * cfg.lambda);
    if (cfg.eta_L > 0.0) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                L(i, j) += cfg.eta_L * normal_vector(rng, 1)[0] * L(i, i);
            }
        }
    }
    // refactor to lower-triangular with bounded spread
    Eigen::MatrixXd cov = L * L.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ce(cov);
    double max_var = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        max_var = std::max(max_var, (s.hi_[i] - s.lo_[i]) * (s.hi_[i] - s.lo_[i]));
    }
    max_var = std::max(max_var, 1e-12);
    const Eigen::VectorXd ev = ce.eigenvalues().cwiseMax(1e-14 * max_var).cwiseMin(max_var);
    cov = ce.eigenvectors() * ev.asDiagonal() * ce.eigenvectors().transpose();
    cov = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
        s.L_ = llt.matrixL();
    }
}

}  // namespace chainopt
