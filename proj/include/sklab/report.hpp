#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sklab/scans.hpp"

namespace sklab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

/// printf %.17g; integral values keep their exponent form so output is stable.
std::string fmt17(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& cells);
    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

nlohmann::json to_json(cplx c);
nlohmann::json to_json(const Eigen::VectorXcd& v);
nlohmann::json to_json(const Eigen::MatrixXcd& m);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const FitResult& f);

struct Verdict {
    std::string name;
    bool passed = false;
    std::string detail;
    bool asserted = true; // informational verdicts never fail a run
};

nlohmann::json to_json(const std::vector<Verdict>& v);
bool all_passed(const std::vector<Verdict>& v);

/// Ladder table. Single pair: eps_abs,z_van_abs,imtau_ij...,err_est; several
/// pairs get z_van_abs_1..k.
CsvTable ladder_table(const DegenerationReport& r);
CsvTable fit_table(const DegenerationReport& r);

/// Riemann relations on every row that was not aborted.
Verdict riemann_verdict(const std::vector<LadderRow>& rows, const std::string& label);

/// Document skeleton: schema_version, version, command, config echo.
nlohmann::json report_header(const std::string& command, const nlohmann::json& echo);

void write_text(const std::string& path, const std::string& text);

} // namespace sklab
