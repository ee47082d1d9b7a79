#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace chainopt {

/// One tunable hyperparameter. Log-scaled parameters are searched in log space.
struct DasParam {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    double initial = 0.5;
    double spread = 0.1;  // initial standard deviation in search coordinates
    bool log_scale = false;
    bool integer = false;
};

struct DasConfig {
    int samples = 8;           // antithetic pairs when even
    double alpha_theta = 0.5;  // mean step
    double alpha_L = 0.2;      // covariance step
    double lambda = 0.0;       // covariance growth per step
    double eta_theta = 0.0;    // exploration noise on the mean
    double eta_L = 0.0;        // exploration noise on the factor
    std::uint64_t seed = 0;
};

struct DasDraw {
    Eigen::VectorXd eps;       // standard normal draw
    Eigen::VectorXd point;     // search coordinates after clamping
    std::vector<double> params;  // parameter values
};

class DasState {
public:
    DasState() = default;
    DasState(std::vector<DasParam> space, DasConfig config);

    std::size_t dim() const { return space_.size(); }
    const std::vector<DasParam>& space() const { return space_; }
    const DasConfig& config() const { return config_; }
    const Eigen::VectorXd& theta() const { return theta_; }
    const Eigen::MatrixXd& L() const { return L_; }
    int step() const { return step_; }

    /// Search coordinates to parameter values (exp for log scale, rounding for integers, clamped).
    std::vector<double> to_params(const Eigen::VectorXd& point) const;
    std::vector<double> params() const { return to_params(theta_); }

    Eigen::VectorXd clamp(Eigen::VectorXd point) const;

private:
    friend void das_update(DasState& state, const std::vector<DasDraw>& draws, const std::vector<double>& costs);

    std::vector<DasParam> space_;
    DasConfig config_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd L_;
    Eigen::VectorXd lo_, hi_;
    int step_ = 0;
};

/// Samples θ + Lε; the draw depends only on the seed and the step count, so repeated calls agree.
std::vector<DasDraw> das_sample(const DasState& state);

/// Natural-gradient style step on the mean and the Cholesky factor from standardized costs.
void das_update(DasState& state, const std::vector<DasDraw>& draws, const std::vector<double>& costs);

}  // namespace chainopt
