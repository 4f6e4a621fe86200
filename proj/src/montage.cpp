#include "curldec/montage.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "curldec/csv.hpp"

namespace curldec {

namespace {

struct BesaEntry {
    const char* label;
    double theta_deg;  // signed inclination, negative = left hemisphere
    double phi_deg;
};

// BESA spherical head coordinates for the cap's channel set.
constexpr BesaEntry kBesa1020[] = {
    {"Fp1", -92.0, -72.0}, {"Fz", 46.0, 90.0},   {"F3", -60.0, -51.0}, {"C3", -46.0, 0.0},
    {"T7", -92.0, 0.0},    {"Pz", 46.0, -90.0},  {"P3", -60.0, 51.0},  {"O1", -92.0, 72.0},
    {"Oz", 92.0, -90.0},   {"O2", 92.0, -72.0},  {"P4", 60.0, -51.0},  {"Cz", 0.0, 0.0},
    {"C4", 46.0, 0.0},     {"T8", 92.0, 0.0},    {"F4", 60.0, 51.0},   {"Fp2", 92.0, 72.0},
};

Montage::Channel to_channel(const BesaEntry& e) {
    const double tb = e.theta_deg * M_PI / 180.0;
    const double pb = e.phi_deg * M_PI / 180.0;
    const double x = std::sin(tb) * std::cos(pb);
    const double y = std::sin(tb) * std::sin(pb);
    const double z = std::cos(tb);
    double theta = std::acos(std::clamp(z, -1.0, 1.0));
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += 2.0 * M_PI;
    if (theta < 1e-12) {
        theta = 0.0;
        phi = 0.0;
    }
    if (theta > kCapElevation) {
        std::cerr << "montage: clamping " << e.label << " elevation to cap limit\n";
        theta = kCapElevation;
    }
    return {e.label, theta, phi};
}

}  // namespace

Montage builtin_montage_1020() {
    std::vector<Montage::Channel> channels;
    channels.reserve(std::size(kBesa1020));
    for (const auto& e : kBesa1020) channels.push_back(to_channel(e));
    return Montage::make(std::move(channels));
}

Montage load_montage_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<Montage::Channel> channels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::string label;
        double theta = 0.0, phi = 0.0;
        std::size_t p1 = line.find(',');
        std::size_t p2 = line.find(',', p1 == std::string::npos ? p1 : p1 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos)
            throw Error(ErrorCode::MalformedHeader,
                        "expected `label,theta_rad,phi_rad` in " + path.string());
        label = line.substr(0, p1);
        try {
            theta = std::stod(line.substr(p1 + 1, p2 - p1 - 1));
            phi = std::stod(line.substr(p2 + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::MalformedNumber, "bad montage entry in " + path.string());
        }
        if (theta > kCapElevation) {
            std::cerr << "montage: clamping " << label << " elevation to cap limit\n";
            theta = kCapElevation;
        }
        channels.push_back({label, theta, phi});
    }
    if (channels.empty()) throw Error(ErrorCode::EmptyRecord, "no channels in " + path.string());
    return Montage::make(std::move(channels));
}

}  // namespace curldec
