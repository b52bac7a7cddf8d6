#include "fracquench/runio.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fq {

namespace {

using nlohmann::json;

// ---- SHA-256 (FIPS 180-4, byte-oriented) ----

struct Sha256 {
    std::uint32_t h[8] = { 0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                           0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u };
    std::uint64_t total = 0;
    unsigned char buf[64];
    std::size_t fill = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void block(const unsigned char* p)
    {
        static const std::uint32_t k[64] = {
            0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu, 0x59f111f1u,
            0x923f82a4u, 0xab1c5ed5u, 0xd807aa98u, 0x12835b01u, 0x243185beu, 0x550c7dc3u,
            0x72be5d74u, 0x80deb1feu, 0x9bdc06a7u, 0xc19bf174u, 0xe49b69c1u, 0xefbe4786u,
            0x0fc19dc6u, 0x240ca1ccu, 0x2de92c6fu, 0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau,
            0x983e5152u, 0xa831c66du, 0xb00327c8u, 0xbf597fc7u, 0xc6e00bf3u, 0xd5a79147u,
            0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu, 0x53380d13u,
            0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u, 0xa2bfe8a1u, 0xa81a664bu,
            0xc24b8b70u, 0xc76c51a3u, 0xd192e819u, 0xd6990624u, 0xf40e3585u, 0x106aa070u,
            0x19a4c116u, 0x1e376c08u, 0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au,
            0x5b9cca4fu, 0x682e6ff3u, 0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u,
            0x90befffau, 0xa4506cebu, 0xbef9a3f7u, 0xc67178f2u
        };
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16)
                 | (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, std::size_t len)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        total += len;
        while (len > 0) {
            const std::size_t take = std::min(len, sizeof(buf) - fill);
            std::memcpy(buf + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == sizeof(buf)) {
                block(buf);
                fill = 0;
            }
        }
    }

    std::string hex()
    {
        const std::uint64_t bits = total * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0;
        while (fill != 56)
            update(&zero, 1);
        unsigned char len[8];
        for (int i = 0; i < 8; ++i)
            len[i] = static_cast<unsigned char>(bits >> (8 * (7 - i)));
        update(len, 8);
        char out[65];
        for (int i = 0; i < 8; ++i)
            std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 64);
    }
};

// ---- config schema ----

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& scope)
{
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a)
                ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + scope + key + "'");
    }
}

double number_at(const json& obj, const char* key, double fallback)
{
    if (!obj.contains(key))
        return fallback;
    if (!obj[key].is_number())
        throw std::invalid_argument(std::string("config: key '") + key + "' must be a number");
    return obj[key].get<double>();
}

RunConfig parse_config_json(const json& doc)
{
    if (!doc.is_object())
        throw std::invalid_argument("config: top level must be an object");
    reject_unknown(doc,
                   { "alpha", "s", "dim", "lengths", "scale", "modes", "reaction", "u0", "h",
                     "t_max", "quench_eps", "h_min", "snapshot_every", "out_dir" },
                   "");

    RunConfig cfg;
    SolveConfig& sc = cfg.solve;

    if (!doc.contains("alpha") || !doc.contains("s"))
        throw std::invalid_argument("config: keys 'alpha' and 's' are required");
    sc.params.alpha = doc["alpha"].get<double>();
    sc.params.s = doc["s"].get<double>();
    if (!(sc.params.alpha > 0.0) || sc.params.alpha > 1.0)
        throw std::invalid_argument("config: 'alpha' must lie in (0, 1]");
    if (!(sc.params.s > 0.0) || sc.params.s > 1.0)
        throw std::invalid_argument("config: 's' must lie in (0, 1]");

    sc.domain.dim = static_cast<int>(number_at(doc, "dim", 1));
    if (doc.contains("lengths")) {
        const json& ls = doc["lengths"];
        if (!ls.is_array() || ls.empty() || ls.size() > 2)
            throw std::invalid_argument("config: 'lengths' must be an array of 1 or 2 numbers");
        for (std::size_t d = 0; d < ls.size(); ++d)
            sc.domain.lengths[d] = ls[d].get<double>();
        if (static_cast<int>(ls.size()) != sc.domain.dim)
            throw std::invalid_argument("config: 'lengths' size must equal 'dim'");
    }
    sc.domain.scale = number_at(doc, "scale", 1.0);
    sc.domain.modes_per_dim = static_cast<int>(number_at(doc, "modes", 128));

    if (doc.contains("reaction")) {
        const json& r = doc["reaction"];
        reject_unknown(r, { "kind", "c", "p", "f_max_cutoff" }, "reaction.");
        if (r.contains("kind")) {
            const std::string kind = r["kind"].get<std::string>();
            if (kind == "inverse_power")
                sc.reaction.kind = ReactionSpec::Kind::inverse_power;
            else if (kind == "exponential_singular")
                sc.reaction.kind = ReactionSpec::Kind::exponential_singular;
            else if (kind == "zero")
                sc.reaction.kind = ReactionSpec::Kind::zero;
            else
                throw std::invalid_argument("config: unknown reaction.kind '" + kind + "'");
        }
        sc.reaction.c = number_at(r, "c", 1.0);
        sc.reaction.p = number_at(r, "p", 1.0);
        sc.reaction.f_max_cutoff = number_at(r, "f_max_cutoff", 1e12);
    }

    cfg.u0_amplitude = number_at(doc, "u0", 0.0);
    if (cfg.u0_amplitude < 0.0 || cfg.u0_amplitude >= sc.reaction.c)
        throw std::invalid_argument("config: 'u0' must satisfy 0 <= u0 < c "
                                    "(initial data must start below the quenching ceiling)");

    sc.h = number_at(doc, "h", 1e-3);
    sc.t_max = number_at(doc, "t_max", 1.0);
    sc.quench_eps = number_at(doc, "quench_eps", 1e-3 * sc.reaction.c);
    sc.h_min = number_at(doc, "h_min", 1e-10);
    sc.snapshot_every = static_cast<int>(number_at(doc, "snapshot_every", 0));
    if (doc.contains("out_dir"))
        cfg.out_dir = doc["out_dir"].get<std::string>();

    sc.validate();
    return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    return parse_config_json(doc);
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_echo(const RunConfig& cfg)
{
    const SolveConfig& sc = cfg.solve;
    json r;
    switch (sc.reaction.kind) {
    case ReactionSpec::Kind::inverse_power: r["kind"] = "inverse_power"; break;
    case ReactionSpec::Kind::exponential_singular: r["kind"] = "exponential_singular"; break;
    case ReactionSpec::Kind::zero: r["kind"] = "zero"; break;
    }
    r["c"] = sc.reaction.c;
    r["p"] = sc.reaction.p;
    r["f_max_cutoff"] = sc.reaction.f_max_cutoff;

    json doc;
    doc["alpha"] = sc.params.alpha;
    doc["s"] = sc.params.s;
    doc["dim"] = sc.domain.dim;
    json ls = json::array();
    for (int d = 0; d < sc.domain.dim; ++d)
        ls.push_back(sc.domain.lengths[static_cast<size_t>(d)]);
    doc["lengths"] = ls;
    doc["scale"] = sc.domain.scale;
    doc["modes"] = sc.domain.modes_per_dim;
    doc["reaction"] = r;
    doc["u0"] = cfg.u0_amplitude;
    doc["h"] = sc.h;
    doc["t_max"] = sc.t_max;
    doc["quench_eps"] = sc.quench_eps;
    doc["h_min"] = sc.h_min;
    doc["snapshot_every"] = sc.snapshot_every;
    if (!cfg.out_dir.empty())
        doc["out_dir"] = cfg.out_dir;
    return doc.dump(2) + "\n";
}

Eigen::ArrayXd u0_from_amplitude(double amplitude, const BasisPtr& basis)
{
    const SpectralBasis& b = *basis;
    if (amplitude == 0.0)
        return Eigen::ArrayXd::Zero(b.size());
    // Peak-normalized product of the per-axis ground modes.
    Eigen::ArrayXd grid;
    if (b.dim() == 1) {
        grid = b.sine_matrix(0).col(0).array();
        grid *= amplitude / b.sine_matrix(0).col(0).maxCoeff();
    } else {
        const Eigen::ArrayXd g1 = b.sine_matrix(0).col(0).array();
        const Eigen::ArrayXd g2 = b.sine_matrix(1).col(0).array();
        const int n = b.modes_per_dim();
        grid.resize(static_cast<Eigen::Index>(n) * n);
        for (int i2 = 0; i2 < n; ++i2)
            for (int i1 = 0; i1 < n; ++i1)
                grid(static_cast<Eigen::Index>(i2) * n + i1) = g1(i1) * g2(i2);
        grid *= amplitude / (g1.maxCoeff() * g2.maxCoeff());
    }
    return from_grid(grid, basis).coeffs();
}

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static void write_file(const std::filesystem::path& path, const std::string& payload)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit: cannot open " + path.string());
    out << payload;
    if (!out)
        throw std::runtime_error("emit: write failed for " + path.string());
}

std::vector<std::string> emit_plotdata(const Trajectory& traj,
                                       const std::filesystem::path& out_dir,
                                       int snapshot_every)
{
    if (traj.times.empty())
        throw std::invalid_argument("emit_plotdata: empty trajectory");
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    std::string trace = "t,max_u,l2,hs,h_used\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double h_used = i == 0 ? 0.0 : traj.times[i] - traj.times[i - 1];
        trace += csv_number(traj.times[i]);
        trace += ',';
        trace += csv_number(traj.max_values[i]);
        trace += ',';
        trace += csv_number(l2_norm(traj.states[i]));
        trace += ',';
        trace += csv_number(hs_norm(traj.states[i]));
        trace += ',';
        trace += csv_number(h_used);
        trace += '\n';
    }
    write_file(out_dir / "trace.csv", trace);
    written.push_back("trace.csv");

    if (snapshot_every > 0) {
        const SpectralBasis& b = *traj.states.front().basis();
        const int nn = b.modes_per_dim();
        int index = 0;
        for (std::size_t i = 0; i < traj.states.size();
             i += static_cast<std::size_t>(snapshot_every)) {
            std::string snap = b.dim() == 1 ? "x,u\n" : "x,y,u\n";
            const Eigen::ArrayXd grid = to_grid(traj.states[i]);
            for (Eigen::Index g = 0; g < grid.size(); ++g) {
                if (b.dim() == 1) {
                    snap += csv_number(b.collocation(0)(g));
                } else {
                    snap += csv_number(b.collocation(0)(g % nn));
                    snap += ',';
                    snap += csv_number(b.collocation(1)(g / nn));
                }
                snap += ',';
                snap += csv_number(grid(g));
                snap += '\n';
            }
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%04d.csv", index++);
            write_file(out_dir / name, snap);
            written.emplace_back(name);
        }
    }
    return written;
}

std::string sweep_csv(const std::vector<SweepCell>& cells)
{
    std::string out = "alpha,s,scale,classification,T_q_lo,T_q_hi,steady_status,residual\n";
    for (const SweepCell& cell : cells) {
        out += csv_number(cell.alpha);
        out += ',';
        out += csv_number(cell.s);
        out += ',';
        out += csv_number(cell.scale);
        out += ',';
        out += cell.error.empty() ? to_string(cell.report.classification) : "error";
        out += ',';
        if (cell.report.t_q_bracket) {
            out += csv_number(cell.report.t_q_bracket->first);
            out += ',';
            out += csv_number(cell.report.t_q_bracket->second);
        } else {
            out += ",";
        }
        out += ',';
        out += cell.error.empty() ? to_string(cell.steady_status) : cell.error;
        out += ',';
        out += std::isnan(cell.residual) ? "" : csv_number(cell.residual);
        out += '\n';
    }
    return out;
}

std::string report_document(const RunConfig& cfg, const Trajectory& traj,
                            const QuenchReport& rep)
{
    json doc;
    doc["status"] = to_string(traj.status);
    doc["classification"] = to_string(rep.classification);
    doc["steps"] = traj.times.size() - 1;
    doc["t_final"] = traj.times.back();
    doc["max_u_final"] = traj.max_values.back();
    if (rep.t_q_bracket)
        doc["t_q_bracket"] = { rep.t_q_bracket->first, rep.t_q_bracket->second };
    json pts = json::array();
    for (Eigen::Index r = 0; r < rep.quench_points.rows(); ++r) {
        json p = json::array();
        for (Eigen::Index d = 0; d < rep.quench_points.cols(); ++d)
            p.push_back(rep.quench_points(r, d));
        pts.push_back(p);
    }
    doc["quench_points"] = pts;
    if (rep.steady_agrees)
        doc["steady_agrees"] = *rep.steady_agrees;
    doc["config"] = json::parse(config_echo(cfg));
    return doc.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes)
{
    Sha256 s;
    s.update(bytes.data(), bytes.size());
    return s.hex();
}

std::string hash_run_outputs(const std::filesystem::path& dir)
{
    std::map<std::string, std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            files.emplace(entry.path().filename().string(), entry.path());

    Sha256 s;
    for (const auto& [name, path] : files) {
        s.update(name.data(), name.size());
        const char nul = '\0';
        s.update(&nul, 1);
        std::ifstream in(path, std::ios::binary);
        char buf[16384];
        while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
            s.update(buf, static_cast<std::size_t>(in.gcount()));
        s.update(&nul, 1);
    }
    return s.hex();
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest)
{
    json doc;
    doc["tool_version"] = manifest.tool_version;
    doc["config"] =
        manifest.config_echo.empty() ? json(nullptr) : json::parse(manifest.config_echo);
    doc["started"] = manifest.started;
    doc["finished"] = manifest.finished;
    doc["output_hash"] = manifest.output_hash;
    doc["status"] = manifest.status;
    doc["seed"] = manifest.seed;
    write_file(dir / "manifest.json", doc.dump(2) + "\n");
}

bool verify_manifest(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in)
        return false;
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error&) {
        return false;
    }
    if (!doc.contains("output_hash") || !doc["output_hash"].is_string())
        return false;
    return doc["output_hash"].get<std::string>() == hash_run_outputs(dir);
}

std::string timestamp_now()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm {};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace fq
