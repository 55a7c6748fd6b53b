#include "meshwm/meshwm.h"

#include "meshwm/error.hpp"
#include "meshwm/io.hpp"
#include "meshwm/pipeline.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

struct meshwm_mesh {
    meshwm::Mesh mesh;
};

struct meshwm_code {
    meshwm::LdpcCode code;
};

struct meshwm_config {
    meshwm::PipelineConfig cfg;
};

struct meshwm_survival {
    meshwm::SurvivalMap map;
};

namespace {

thread_local std::string g_last_error;

meshwm_status status_of(meshwm::ErrorKind kind)
{
    switch (kind) {
    case meshwm::ErrorKind::InvalidArgument: return MESHWM_E_INVALID_ARGUMENT;
    case meshwm::ErrorKind::Parse: return MESHWM_E_PARSE;
    case meshwm::ErrorKind::Config: return MESHWM_E_CONFIG;
    case meshwm::ErrorKind::Capability: return MESHWM_E_CAPABILITY;
    case meshwm::ErrorKind::Io: return MESHWM_E_IO;
    }
    return MESHWM_E_INTERNAL;
}

template <class F>
meshwm_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return MESHWM_OK;
    } catch (const meshwm::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MESHWM_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MESHWM_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return MESHWM_E_INTERNAL;
    }
}

template <class T>
void require(const T* p, const char* what)
{
    if (!p)
        throw meshwm::InvalidArgument(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

const meshwm::PipelineConfig& config_or_default(const meshwm_config* cfg)
{
    static const meshwm::PipelineConfig defaults;
    return cfg ? cfg->cfg : defaults;
}

} // namespace

extern "C" {

const char* meshwm_last_error(void) { return g_last_error.c_str(); }

const char* meshwm_version(void) { return "1.0.0"; }

const char* meshwm_status_name(meshwm_status status)
{
    switch (status) {
    case MESHWM_OK: return "ok";
    case MESHWM_E_INVALID_ARGUMENT: return "invalid argument";
    case MESHWM_E_PARSE: return "parse error";
    case MESHWM_E_CONFIG: return "config error";
    case MESHWM_E_CAPABILITY: return "capability error";
    case MESHWM_E_IO: return "i/o error";
    case MESHWM_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void meshwm_string_free(char* s) { std::free(s); }

meshwm_status meshwm_mesh_read(const char* path, meshwm_mesh** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new meshwm_mesh{meshwm::read_obj_file(path)};
    });
}

meshwm_status meshwm_mesh_parse(const char* obj_text, meshwm_mesh** out)
{
    return guarded([&] {
        require(obj_text, "obj_text");
        require(out, "out");
        *out = new meshwm_mesh{meshwm::parse_obj(obj_text)};
    });
}

meshwm_status meshwm_mesh_write(const meshwm_mesh* mesh, const char* path)
{
    return guarded([&] {
        require(mesh, "mesh");
        require(path, "path");
        meshwm::write_obj_file(mesh->mesh, path);
    });
}

meshwm_status meshwm_mesh_counts(const meshwm_mesh* mesh, size_t* vertices, size_t* faces)
{
    return guarded([&] {
        require(mesh, "mesh");
        if (vertices)
            *vertices = mesh->mesh.vertex_count();
        if (faces)
            *faces = mesh->mesh.face_count();
    });
}

meshwm_status meshwm_mesh_hausdorff(const meshwm_mesh* a, const meshwm_mesh* b, double* out)
{
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = meshwm::hausdorff(a->mesh.vertices(), b->mesh.vertices());
    });
}

void meshwm_mesh_free(meshwm_mesh* mesh) { delete mesh; }

meshwm_status meshwm_config_default(meshwm_config** out)
{
    return guarded([&] {
        require(out, "out");
        *out = new meshwm_config{};
    });
}

meshwm_status meshwm_config_load(const char* path, meshwm_config** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new meshwm_config{meshwm::PipelineConfig::load(path)};
    });
}

meshwm_status meshwm_config_set(meshwm_config* cfg, const char* key, const char* value)
{
    return guarded([&] {
        require(cfg, "cfg");
        require(key, "key");
        require(value, "value");
        meshwm::PipelineConfig next = cfg->cfg;
        next.set(key, value);
        next.validate();
        cfg->cfg = std::move(next);
    });
}

meshwm_status meshwm_config_dump(const meshwm_config* cfg, char** out)
{
    return guarded([&] {
        require(out, "out");
        *out = dup_string(config_or_default(cfg).dump());
    });
}

void meshwm_config_free(meshwm_config* cfg) { delete cfg; }

meshwm_status meshwm_code_construct(unsigned q, unsigned mu, unsigned eta, uint64_t seed, meshwm_code** out)
{
    return guarded([&] {
        require(out, "out");
        *out = new meshwm_code{meshwm::construct_code(q, mu, eta, seed)};
    });
}

meshwm_status meshwm_code_read_alist(const char* path, meshwm_code** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new meshwm_code{meshwm::LdpcCode(meshwm::read_alist_file(path))};
    });
}

meshwm_status meshwm_code_from_config(const meshwm_config* cfg, meshwm_code** out)
{
    return guarded([&] {
        require(cfg, "cfg");
        require(out, "out");
        if (cfg->cfg.code_path.empty())
            throw meshwm::ConfigError("config: no `code` path set");
        *out = new meshwm_code{meshwm::LdpcCode(meshwm::read_alist_file(cfg->cfg.code_path))};
    });
}

meshwm_status meshwm_code_write_alist(const meshwm_code* code, const char* path)
{
    return guarded([&] {
        require(code, "code");
        require(path, "path");
        meshwm::write_alist_file(code->code.H(), path);
    });
}

meshwm_status meshwm_code_dims(const meshwm_code* code, size_t* n, size_t* k)
{
    return guarded([&] {
        require(code, "code");
        if (n)
            *n = code->code.n();
        if (k)
            *k = code->code.k();
    });
}

meshwm_status meshwm_code_report(const meshwm_code* code, const meshwm_config* cfg, char** json)
{
    return guarded([&] {
        require(code, "code");
        require(json, "json");
        *json = dup_string(meshwm::describe_code(code->code, config_or_default(cfg).alphabet()).to_json());
    });
}

void meshwm_code_free(meshwm_code* code) { delete code; }

meshwm_status meshwm_embed(const meshwm_mesh* mesh, const char* payload, uint64_t key, const meshwm_config* cfg,
                           const meshwm_code* code, meshwm_mesh** marked, char** report_json)
{
    return guarded([&] {
        require(mesh, "mesh");
        require(payload, "payload");
        require(code, "code");
        require(marked, "marked");
        require(report_json, "report_json");
        const auto bits = meshwm::parse_payload(payload);
        auto result = meshwm::embed_watermark(mesh->mesh, bits, key, config_or_default(cfg), code->code);
        char* report = dup_string(result.report.to_json());
        *marked = new meshwm_mesh{std::move(result.mesh)};
        *report_json = report;
    });
}

meshwm_status meshwm_extract_blind(const meshwm_mesh* mesh, uint64_t key, const meshwm_config* cfg,
                                   const meshwm_code* code, char** report_json)
{
    return guarded([&] {
        require(mesh, "mesh");
        require(code, "code");
        require(report_json, "report_json");
        *report_json =
            dup_string(meshwm::extract_blind(mesh->mesh, key, config_or_default(cfg), code->code).to_json());
    });
}

meshwm_status meshwm_extract_oracle(const meshwm_mesh* attacked, const char* embed_report_json,
                                    const meshwm_survival* survival, uint64_t key, const meshwm_config* cfg,
                                    const meshwm_code* code, char** report_json)
{
    return guarded([&] {
        require(attacked, "attacked");
        require(embed_report_json, "embed_report_json");
        require(survival, "survival");
        require(code, "code");
        require(report_json, "report_json");
        const auto embed = meshwm::EmbedReport::from_json(embed_report_json);
        const auto rep = meshwm::extract_oracle(attacked->mesh, embed.selection, survival->map, key,
                                                config_or_default(cfg), code->code);
        *report_json = dup_string(rep.to_json());
    });
}

meshwm_status meshwm_attack_simplify(const meshwm_mesh* mesh, double face_fraction, meshwm_mesh** out,
                                     meshwm_survival** survival)
{
    return guarded([&] {
        require(mesh, "mesh");
        require(out, "out");
        require(survival, "survival");
        auto r = meshwm::simplify_mesh(mesh->mesh, face_fraction);
        auto* s = new meshwm_survival{std::move(r.survival)};
        *out = new meshwm_mesh{std::move(r.mesh)};
        *survival = s;
    });
}

meshwm_status meshwm_attack_region(const meshwm_mesh* mesh, uint32_t center, unsigned hops, meshwm_mesh** out,
                                   meshwm_survival** survival)
{
    return guarded([&] {
        require(mesh, "mesh");
        require(out, "out");
        require(survival, "survival");
        auto r = meshwm::region_delete(mesh->mesh, center, hops);
        auto* s = new meshwm_survival{std::move(r.survival)};
        *out = new meshwm_mesh{std::move(r.mesh)};
        *survival = s;
    });
}

meshwm_status meshwm_survival_read(const char* path, meshwm_survival** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new meshwm_survival{meshwm::SurvivalMap::from_csv(meshwm::read_text_file(path))};
    });
}

meshwm_status meshwm_survival_write(const meshwm_survival* survival, const char* path)
{
    return guarded([&] {
        require(survival, "survival");
        require(path, "path");
        meshwm::write_text_file(path, survival->map.to_csv());
    });
}

meshwm_status meshwm_survival_counts(const meshwm_survival* survival, size_t* original, size_t* survived)
{
    return guarded([&] {
        require(survival, "survival");
        if (original)
            *original = survival->map.original_count();
        if (survived)
            *survived = survival->map.survivor_count();
    });
}

void meshwm_survival_free(meshwm_survival* survival) { delete survival; }

meshwm_status meshwm_sweep(const meshwm_code* code, const meshwm_config* cfg, const double* p_list, size_t p_count,
                           size_t frames, uint64_t seed, char** csv)
{
    return guarded([&] {
        require(code, "code");
        require(csv, "csv");
        if (p_count > 0)
            require(p_list, "p_list");
        const auto& c = config_or_default(cfg);
        meshwm::SweepOptions opt;
        opt.frames = frames;
        opt.seed = seed;
        opt.max_iter = c.decoder_max_iter;
        opt.polarity = c.polarity;
        const auto rows = meshwm::run_sweep(code->code, c.alphabet(), {p_list, p_count}, opt);
        *csv = dup_string(meshwm::sweep_csv(rows));
    });
}

meshwm_status meshwm_capacity(const size_t* alphabet_sizes, size_t size_count, const double* p_list, size_t p_count,
                              unsigned s_d, double tol, int max_iter, char** csv)
{
    return guarded([&] {
        require(csv, "csv");
        if (size_count > 0)
            require(alphabet_sizes, "alphabet_sizes");
        if (p_count > 0)
            require(p_list, "p_list");
        const auto rows =
            meshwm::capacity_sweep({alphabet_sizes, size_count}, {p_list, p_count}, s_d, tol, max_iter);
        *csv = dup_string(meshwm::capacity_csv(rows));
    });
}

} // extern "C"
