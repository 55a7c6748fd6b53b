// Command-line front end over the C API.

#include "meshwm/meshwm.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitParse = 3,
    kExitConfig = 4,
    kExitCapability = 5,
    kExitIo = 6,
    kExitInvalidArgument = 7,
    kExitNotConverged = 8,
};

int exit_code_for(meshwm_status s)
{
    switch (s) {
    case MESHWM_OK: return kExitOk;
    case MESHWM_E_INVALID_ARGUMENT: return kExitInvalidArgument;
    case MESHWM_E_PARSE: return kExitParse;
    case MESHWM_E_CONFIG: return kExitConfig;
    case MESHWM_E_CAPABILITY: return kExitCapability;
    case MESHWM_E_IO: return kExitIo;
    case MESHWM_E_INTERNAL: return kExitInternal;
    }
    return kExitInternal;
}

struct Failure {
    int code;
};

void check(meshwm_status s)
{
    if (s != MESHWM_OK) {
        std::cerr << "meshwm: " << meshwm_status_name(s) << ": " << meshwm_last_error() << "\n";
        throw Failure{exit_code_for(s)};
    }
}

void fail(int code, const std::string& msg)
{
    std::cerr << "meshwm: " << msg << "\n";
    throw Failure{code};
}

struct MeshDel {
    void operator()(meshwm_mesh* p) const { meshwm_mesh_free(p); }
};
struct CodeDel {
    void operator()(meshwm_code* p) const { meshwm_code_free(p); }
};
struct ConfigDel {
    void operator()(meshwm_config* p) const { meshwm_config_free(p); }
};
struct SurvivalDel {
    void operator()(meshwm_survival* p) const { meshwm_survival_free(p); }
};
using MeshPtr = std::unique_ptr<meshwm_mesh, MeshDel>;
using CodePtr = std::unique_ptr<meshwm_code, CodeDel>;
using ConfigPtr = std::unique_ptr<meshwm_config, ConfigDel>;
using SurvivalPtr = std::unique_ptr<meshwm_survival, SurvivalDel>;

// Takes ownership of a string returned by the library.
std::string take(char* s)
{
    std::string out = s ? s : "";
    meshwm_string_free(s);
    return out;
}

MeshPtr read_mesh(const std::string& path)
{
    meshwm_mesh* m = nullptr;
    check(meshwm_mesh_read(path.c_str(), &m));
    return MeshPtr(m);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(kExitIo, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        fail(kExitIo, "cannot write '" + path + "'");
}

// Output to a file, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

struct ConfigOptions {
    std::string path;
    std::string code;
    std::vector<std::string> overrides;

    void add_to(CLI::App* cmd, bool with_code = true)
    {
        cmd->add_option("-c,--config", path, "key=value configuration file");
        if (with_code)
            cmd->add_option("--code", code, "alist parity-check file (overrides the config's code)");
        cmd->add_option("--set", overrides, "override one config key, as key=value")->take_all();
    }

    ConfigPtr load() const
    {
        meshwm_config* c = nullptr;
        if (path.empty())
            check(meshwm_config_default(&c));
        else
            check(meshwm_config_load(path.c_str(), &c));
        ConfigPtr cfg(c);
        if (!code.empty())
            check(meshwm_config_set(cfg.get(), "code", code.c_str()));
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                fail(kExitConfig, "--set expects key=value, got '" + kv + "'");
            check(meshwm_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
        }
        return cfg;
    }
};

CodePtr code_for(const meshwm_config* cfg)
{
    meshwm_code* c = nullptr;
    check(meshwm_code_from_config(cfg, &c));
    return CodePtr(c);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Runlength-coded LDPC watermarking of triangle meshes"};
    app.set_version_flag("--version", std::string(meshwm_version()));
    app.require_subcommand(1);

    // embed
    auto* embed = app.add_subcommand("embed", "embed a payload into a mesh");
    std::string e_mesh, e_out, e_payload, e_report;
    std::uint64_t e_key = 0;
    ConfigOptions e_cfg;
    embed->add_option("-m,--mesh", e_mesh, "input OBJ")->required();
    embed->add_option("-o,--out", e_out, "watermarked OBJ")->required();
    embed->add_option("-p,--payload", e_payload, "payload bits: 0/1 string or hex:...")->required();
    embed->add_option("-k,--key", e_key, "secret key")->required();
    embed->add_option("-r,--report", e_report, "embed report JSON (default: stdout)");
    e_cfg.add_to(embed);

    // extract
    auto* extract = app.add_subcommand("extract", "recover a payload from a mesh");
    std::string x_mesh, x_mode = "blind", x_embed_report, x_survival, x_report;
    std::uint64_t x_key = 0;
    bool x_strict = false;
    ConfigOptions x_cfg;
    extract->add_option("-m,--mesh", x_mesh, "received OBJ")->required();
    extract->add_option("-k,--key", x_key, "secret key")->required();
    extract->add_option("--mode", x_mode, "blind or oracle")->check(CLI::IsMember({"blind", "oracle"}));
    extract->add_option("--embed-report", x_embed_report, "embed report JSON (oracle mode)");
    extract->add_option("--survival", x_survival, "survival map CSV from the attack (oracle mode)");
    extract->add_option("-r,--report", x_report, "extract report JSON");
    extract->add_flag("--strict", x_strict, "exit with status 8 when the decoder does not converge");
    x_cfg.add_to(extract);

    // attack
    auto* attack = app.add_subcommand("attack", "simplify a mesh or delete a region");
    std::string a_mesh, a_out, a_survival;
    double a_fraction = -1.0;
    int a_hops = -1;
    std::int64_t a_center = -1;
    std::uint64_t a_seed = 1;
    attack->add_option("-m,--mesh", a_mesh, "input OBJ")->required();
    attack->add_option("-o,--out", a_out, "attacked OBJ")->required();
    attack->add_option("-s,--survival", a_survival, "survival map CSV")->required();
    auto* a_simplify_opt = attack->add_option("--simplify", a_fraction, "target face fraction in (0, 1]");
    auto* a_region_opt = attack->add_option("--region", a_hops, "delete all vertices within this many hops");
    attack->add_option("--center", a_center, "region center vertex (default: drawn from --seed)");
    attack->add_option("--seed", a_seed, "seed for the region center");
    a_simplify_opt->excludes(a_region_opt);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "BER/FER of the coded runlength channel");
    std::vector<double> s_p{0.05, 0.04, 0.03, 0.02, 0.01};
    std::size_t s_frames = 1000;
    std::uint64_t s_seed = 1;
    std::string s_out;
    ConfigOptions s_cfg;
    sweep->add_option("--p", s_p, "deletion probabilities")->delimiter(',');
    sweep->add_option("--frames", s_frames, "frames per point");
    sweep->add_option("--seed", s_seed, "master seed");
    sweep->add_option("-o,--out", s_out, "CSV output (default: stdout)");
    s_cfg.add_to(sweep);

    // capacity
    auto* capacity = app.add_subcommand("capacity", "unit-cost capacity over alphabet sizes and p_d");
    std::vector<std::size_t> c_sizes{2, 4, 8, 16};
    std::vector<double> c_p{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
    unsigned c_sd = 1;
    double c_tol = 1e-9;
    int c_max_iter = 10000;
    std::string c_out;
    capacity->add_option("--sizes", c_sizes, "alphabet sizes (powers of two)")->delimiter(',');
    capacity->add_option("--p", c_p, "deletion probabilities")->delimiter(',');
    capacity->add_option("--s-d", c_sd, "maximum consecutive deletions");
    capacity->add_option("--tol", c_tol, "stopping tolerance on the capacity bound gap");
    capacity->add_option("--max-iter", c_max_iter, "iteration cap");
    capacity->add_option("-o,--out", c_out, "CSV output (default: stdout)");

    // codegen
    auto* codegen = app.add_subcommand("codegen", "construct a girth-6 LDPC code");
    unsigned g_q = 0, g_mu = 0, g_eta = 0;
    std::uint64_t g_seed = 1;
    std::string g_out, g_report;
    ConfigOptions g_cfg;
    codegen->add_option("--q", g_q, "Latin square order")->required();
    codegen->add_option("--mu", g_mu, "column weight")->required();
    codegen->add_option("--eta", g_eta, "row weight")->required();
    codegen->add_option("--seed", g_seed, "search seed");
    codegen->add_option("-o,--out", g_out, "alist output")->required();
    codegen->add_option("-r,--report", g_report, "parameter report JSON (default: stdout)");
    g_cfg.add_to(codegen, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*embed) {
            auto cfg = e_cfg.load();
            auto code = code_for(cfg.get());
            auto mesh = read_mesh(e_mesh);
            meshwm_mesh* marked = nullptr;
            char* report = nullptr;
            check(meshwm_embed(mesh.get(), e_payload.c_str(), e_key, cfg.get(), code.get(), &marked, &report));
            MeshPtr out(marked);
            const std::string rep = take(report);
            check(meshwm_mesh_write(out.get(), e_out.c_str()));
            emit(e_report, rep);
        } else if (*extract) {
            auto cfg = x_cfg.load();
            auto code = code_for(cfg.get());
            auto mesh = read_mesh(x_mesh);
            char* report = nullptr;
            if (x_mode == "oracle") {
                if (x_embed_report.empty() || x_survival.empty())
                    fail(kExitUsage, "oracle mode needs --embed-report and --survival");
                const std::string embed_json = read_file(x_embed_report);
                meshwm_survival* s = nullptr;
                check(meshwm_survival_read(x_survival.c_str(), &s));
                SurvivalPtr surv(s);
                check(meshwm_extract_oracle(mesh.get(), embed_json.c_str(), surv.get(), x_key, cfg.get(),
                                            code.get(), &report));
            } else {
                check(meshwm_extract_blind(mesh.get(), x_key, cfg.get(), code.get(), &report));
            }
            const std::string rep = take(report);
            const auto j = nlohmann::json::parse(rep);
            if (!x_report.empty())
                write_file(x_report, rep);
            std::cout << j.at("payload").get<std::string>() << "\n";
            if (!j.at("converged").get<bool>()) {
                std::cerr << "meshwm: decoder did not converge; payload is a best-effort decision\n";
                if (x_strict)
                    return kExitNotConverged;
            }
        } else if (*attack) {
            auto mesh = read_mesh(a_mesh);
            meshwm_mesh* out = nullptr;
            meshwm_survival* s = nullptr;
            if (*a_simplify_opt) {
                check(meshwm_attack_simplify(mesh.get(), a_fraction, &out, &s));
            } else if (*a_region_opt) {
                std::size_t nv = 0;
                check(meshwm_mesh_counts(mesh.get(), &nv, nullptr));
                if (nv == 0)
                    fail(kExitInvalidArgument, "mesh has no vertices");
                std::uint32_t center = 0;
                if (a_center >= 0) {
                    center = static_cast<std::uint32_t>(a_center);
                } else {
                    std::mt19937_64 rng(a_seed);
                    center = static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, nv - 1)(rng));
                }
                if (a_hops < 0)
                    fail(kExitUsage, "--region needs a non-negative hop count");
                check(meshwm_attack_region(mesh.get(), center, static_cast<unsigned>(a_hops), &out, &s));
                std::cerr << "region center " << center << "\n";
            } else {
                fail(kExitUsage, "attack needs --simplify or --region");
            }
            MeshPtr attacked(out);
            SurvivalPtr surv(s);
            check(meshwm_mesh_write(attacked.get(), a_out.c_str()));
            check(meshwm_survival_write(surv.get(), a_survival.c_str()));
            std::size_t orig = 0, kept = 0;
            check(meshwm_survival_counts(surv.get(), &orig, &kept));
            std::cerr << "kept " << kept << " of " << orig << " vertices\n";
        } else if (*sweep) {
            auto cfg = s_cfg.load();
            auto code = code_for(cfg.get());
            char* csv = nullptr;
            check(meshwm_sweep(code.get(), cfg.get(), s_p.data(), s_p.size(), s_frames, s_seed, &csv));
            emit(s_out, take(csv));
        } else if (*capacity) {
            char* csv = nullptr;
            check(meshwm_capacity(c_sizes.data(), c_sizes.size(), c_p.data(), c_p.size(), c_sd, c_tol, c_max_iter,
                                  &csv));
            emit(c_out, take(csv));
        } else if (*codegen) {
            auto cfg = g_cfg.load();
            meshwm_code* c = nullptr;
            check(meshwm_code_construct(g_q, g_mu, g_eta, g_seed, &c));
            CodePtr code(c);
            check(meshwm_code_write_alist(code.get(), g_out.c_str()));
            char* report = nullptr;
            check(meshwm_code_report(code.get(), cfg.get(), &report));
            emit(g_report, take(report));
        }
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "meshwm: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
