#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "twpa/analysis.hpp"
#include "twpa/calibration.hpp"
#include "twpa/errors.hpp"

namespace twpa {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
            line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

/// Quadrature dataset in the `i_mv,q_mv,pump_state,channel` layout. The
/// header row is required.
inline QuadratureDataset read_quadrature_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw Error(path + ": empty file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 4 || header[0] != "i_mv" || header[1] != "q_mv" ||
        header[2] != "pump_state" || header[3] != "channel")
        throw Error(path + ": expected header i_mv,q_mv,pump_state,channel");

    QuadratureDataset ds;
    ds.samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() < 4) throw Error(path + ": short row " + std::to_string(i + 1));
        IqSample s;
        s.i_mv = std::stod(f[0]);
        s.q_mv = std::stod(f[1]);
        if (!std::isfinite(s.i_mv) || !std::isfinite(s.q_mv))
            throw Error(path + ": non-finite sample at row " + std::to_string(i + 1));
        if (f[2] == "on")
            s.pump = PumpSwitch::On;
        else if (f[2] == "off")
            s.pump = PumpSwitch::Off;
        else
            throw Error(path + ": pump_state must be on/off");
        if (f[3] == "single")
            s.channel = Channel::Single;
        else if (f[3] == "signal")
            s.channel = Channel::Signal;
        else if (f[3] == "idler")
            s.channel = Channel::Idler;
        else
            throw Error(path + ": channel must be single/signal/idler");
        ds.samples.push_back(s);
    }
    return ds;
}

inline void write_quadrature_csv(const std::string& path, const QuadratureDataset& ds) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "i_mv,q_mv,pump_state,channel\n";
    out.precision(10);
    for (const auto& s : ds.samples)
        out << s.i_mv << ',' << s.q_mv << ',' << to_string(s.pump) << ','
            << to_string(s.channel) << '\n';
}

/// SNTJ curve in the `v_bias_uv,noise_dbm` layout.
inline std::vector<SntjPoint> read_sntj_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_csv_line(lines[0])[0] != "v_bias_uv")
        throw Error(path + ": expected header v_bias_uv,noise_dbm");
    std::vector<SntjPoint> pts;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() < 2) throw Error(path + ": short row");
        pts.push_back(SntjPoint{std::stod(f[0]) * 1e-6, watts_from_dbm(std::stod(f[1]))});
    }
    return pts;
}

inline void write_sntj_csv(const std::string& path, const std::vector<SntjPoint>& pts) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "v_bias_uv,noise_dbm\n";
    out.precision(12);
    for (const auto& p : pts)
        out << p.v_bias * 1e6 << ',' << dbm_from_watts(p.noise_watts) << '\n';
}

/// wQED scan in the `detuning_mhz,power_dbm,s21_real,s21_imag` layout;
/// rows grouped by power, detuning grid identical across powers.
inline WqedScan read_wqed_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_csv_line(lines[0])[0] != "detuning_mhz")
        throw Error(path + ": expected header detuning_mhz,power_dbm,s21_real,s21_imag");
    WqedScan scan;
    std::vector<double> detunings;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() < 4) throw Error(path + ": short row");
        const double det = std::stod(f[0]) * 1e6;
        const double pow_dbm = std::stod(f[1]);
        if (scan.powers.empty() || pow_dbm != scan.powers.back()) {
            scan.powers.push_back(pow_dbm);
            if (!scan.powers.empty() && scan.powers.size() > 1 &&
                detunings.size() != scan.detunings.size())
                throw Error(path + ": ragged detuning grid");
            if (scan.powers.size() == 2) scan.detunings = detunings;
            detunings.clear();
        }
        detunings.push_back(det);
        scan.s21.emplace_back(std::stod(f[2]), std::stod(f[3]));
    }
    if (scan.detunings.empty()) scan.detunings = detunings;
    if (scan.s21.size() != scan.detunings.size() * scan.powers.size())
        throw Error(path + ": ragged scan");
    return scan;
}

inline void write_wqed_csv(const std::string& path, const WqedScan& scan) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "detuning_mhz,power_dbm,s21_real,s21_imag\n";
    out.precision(12);
    for (std::size_t r = 0; r < scan.powers.size(); ++r)
        for (std::size_t c = 0; c < scan.detunings.size(); ++c) {
            const auto& t = scan.s21[r * scan.detunings.size() + c];
            out << scan.detunings[c] * 1e-6 << ',' << scan.powers[r] << ',' << t.real()
                << ',' << t.imag() << '\n';
        }
}

} // namespace twpa
