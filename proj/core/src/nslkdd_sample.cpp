#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "fsnid/acceptance.hpp"
#include "fsnid/errors.hpp"
#include "fsnid/rng.hpp"

namespace fsnid {

namespace {

constexpr std::array<const char*, 41> kColumns = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
    "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
    "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
    "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
    "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate"};

enum Cls { kNormal = 0, kDos = 1, kProbe = 2, kR2l = 3 };

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void write_nslkdd_sample(const std::string& path, size_t rows, uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out.precision(6);

    for (const char* col : kColumns) out << col << ',';
    out << "label\n";

    Rng rng(mix_seed(seed, 0x4e534cu));
    const char* label_names[] = {"normal", "dos", "probe", "r2l"};

    for (size_t r = 0; r < rows; ++r) {
        const double u = rng.u01();
        const int cls = u < 0.55 ? kNormal : (u < 0.80 ? kDos : (u < 0.92 ? kProbe : kR2l));

        std::array<double, 41> v{};
        // class-dependent signal columns
        v[0] = cls == kR2l ? 60.0 + 40.0 * std::abs(rng.normal())
                           : 5.0 + 10.0 * std::abs(rng.normal());             // duration
        v[4] = cls == kNormal ? 300.0 + 250.0 * std::abs(rng.normal())
               : cls == kDos  ? 1000.0 + 300.0 * rng.normal()
               : cls == kProbe ? 50.0 + 40.0 * std::abs(rng.normal())
                               : 150.0 + 120.0 * std::abs(rng.normal());      // src_bytes
        v[10] = cls == kR2l ? std::round(3.0 + 1.5 * std::abs(rng.normal()))
                            : (rng.u01() < 0.05 ? 1.0 : 0.0);                 // num_failed_logins
        v[11] = rng.u01() < (cls == kNormal ? 0.75 : cls == kR2l ? 0.15 : 0.3) ? 1.0
                                                                               : 0.0;  // logged_in
        v[22] = cls == kDos   ? 400.0 + 100.0 * rng.normal()
                : cls == kProbe ? 180.0 + 60.0 * rng.normal()
                                : 25.0 + 15.0 * std::abs(rng.normal());       // count
        v[24] = cls == kDos ? clamp01(0.85 + 0.08 * rng.normal())
                            : clamp01(0.05 + 0.05 * std::abs(rng.normal())); // serror_rate
        v[29] = cls == kProbe ? clamp01(0.65 + 0.12 * rng.normal())
                              : clamp01(0.08 + 0.06 * std::abs(rng.normal())); // diff_srv_rate
        // redundant echoes of the signal columns
        v[25] = clamp01(0.9 * v[24] + 0.04 * rng.normal());   // srv_serror_rate
        v[37] = clamp01(0.85 * v[24] + 0.06 * rng.normal());  // dst_host_serror_rate
        v[28] = clamp01(1.0 - v[29] + 0.05 * rng.normal());   // same_srv_rate

        // label-independent noise columns
        v[1] = static_cast<double>(rng.index(3));                      // protocol_type code
        v[2] = static_cast<double>(rng.index(60));                     // service code
        v[3] = static_cast<double>(rng.index(11));                     // flag code
        v[5] = 200.0 + 500.0 * std::abs(rng.normal());                 // dst_bytes
        v[6] = rng.u01() < 0.001 ? 1.0 : 0.0;                          // land
        v[7] = rng.u01() < 0.01 ? static_cast<double>(rng.index(3)) : 0.0;
        v[8] = rng.u01() < 0.005 ? 1.0 : 0.0;                          // urgent
        v[9] = std::floor(2.0 * rng.u01());                            // hot
        v[12] = rng.u01() < 0.03 ? 1.0 : 0.0;
        v[13] = rng.u01() < 0.01 ? 1.0 : 0.0;
        v[14] = rng.u01() < 0.01 ? 1.0 : 0.0;
        v[15] = std::floor(2.0 * rng.u01());
        v[16] = rng.u01() < 0.02 ? 1.0 : 0.0;
        v[17] = rng.u01() < 0.01 ? 1.0 : 0.0;
        v[18] = rng.u01() < 0.02 ? 1.0 : 0.0;
        v[19] = 0.0;                                                   // num_outbound_cmds, constant
        v[20] = rng.u01() < 0.002 ? 1.0 : 0.0;
        v[21] = rng.u01() < 0.02 ? 1.0 : 0.0;
        v[23] = 10.0 + 20.0 * std::abs(rng.normal());                  // srv_count
        v[26] = clamp01(0.1 + 0.1 * std::abs(rng.normal()));           // rerror_rate
        v[27] = clamp01(0.1 + 0.1 * std::abs(rng.normal()));
        v[30] = clamp01(0.2 * rng.u01());
        v[31] = std::floor(255.0 * rng.u01());                         // dst_host_count
        v[32] = std::floor(255.0 * rng.u01());
        v[33] = clamp01(rng.u01());
        v[34] = clamp01(0.3 * rng.u01());
        v[35] = clamp01(rng.u01());
        v[36] = clamp01(0.2 * rng.u01());
        v[38] = clamp01(0.1 + 0.08 * std::abs(rng.normal()));
        v[39] = clamp01(0.1 + 0.08 * std::abs(rng.normal()));
        v[40] = clamp01(0.1 + 0.08 * std::abs(rng.normal()));

        for (double value : v) out << value << ',';
        out << label_names[cls] << '\n';
    }
}

}  // namespace fsnid
