#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace catscatter::cli {

/// Inclusive grid written on the command line as `A` or `A:B:N`.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;

    static GridSpec parse(const std::string& text);
    std::vector<double> values() const;
};

/// Fully-resolved command line. Serialized next to every output file so the
/// run can be reproduced with `--config`.
struct RunConfig {
    std::string subcommand;

    std::string state = "gaussian";
    double sigma_perp = 2.0;
    std::optional<double> sigma_x;
    std::optional<double> sigma_y;
    double r0 = 2.0;
    double phi_r0_deg = 0.0;
    double sigma_z = 10.0;
    double p_i = 10.0;
    double p_f = 10.0;

    bool wide = true;
    double sigma_t = 20.0;
    double b0x = 0.0;
    double b0y = 0.0;

    GridSpec theta_deg{10.0, 10.0, 1};
    GridSpec phi_deg{0.0, 0.0, 1};
    int phi_grid = 0;  // > 0: that many points over [0, 360)

    std::string metric = "para-perp";
    std::string method = "auto";
    std::optional<double> tol;
    std::int64_t n_e = 1;

    int grid = 128;
    std::string mode = "slice";

    std::string axis = "r0";
    std::vector<double> values;

    std::string out;
    std::string format = "csv";

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// Entry point behind the `catscatter` binary. Returns 0 on success, 1 on
/// input or evaluation errors, 2 when `validate` finds a failing check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catscatter::cli
