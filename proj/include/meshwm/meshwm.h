#ifndef MESHWM_H
#define MESHWM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MESHWM_BUILDING)
#    define MESHWM_API __declspec(dllexport)
#  else
#    define MESHWM_API __declspec(dllimport)
#  endif
#else
#  define MESHWM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum meshwm_status {
    MESHWM_OK = 0,
    MESHWM_E_INVALID_ARGUMENT = 1,
    MESHWM_E_PARSE = 2,
    MESHWM_E_CONFIG = 3,
    MESHWM_E_CAPABILITY = 4,
    MESHWM_E_IO = 5,
    MESHWM_E_INTERNAL = 6
} meshwm_status;

typedef struct meshwm_mesh meshwm_mesh;
typedef struct meshwm_code meshwm_code;
typedef struct meshwm_config meshwm_config;
typedef struct meshwm_survival meshwm_survival;

/* Message of the last failed call on this thread; "" after a success. */
MESHWM_API const char* meshwm_last_error(void);
MESHWM_API const char* meshwm_version(void);
MESHWM_API const char* meshwm_status_name(meshwm_status status);
/* Strings returned through char** out-parameters are owned by the caller. */
MESHWM_API void meshwm_string_free(char* s);

/* Meshes (Wavefront OBJ, triangles only) */
MESHWM_API meshwm_status meshwm_mesh_read(const char* path, meshwm_mesh** out);
MESHWM_API meshwm_status meshwm_mesh_parse(const char* obj_text, meshwm_mesh** out);
MESHWM_API meshwm_status meshwm_mesh_write(const meshwm_mesh* mesh, const char* path);
MESHWM_API meshwm_status meshwm_mesh_counts(const meshwm_mesh* mesh, size_t* vertices, size_t* faces);
MESHWM_API meshwm_status meshwm_mesh_hausdorff(const meshwm_mesh* a, const meshwm_mesh* b, double* out);
MESHWM_API void meshwm_mesh_free(meshwm_mesh* mesh);

/* Configuration (key=value text) */
MESHWM_API meshwm_status meshwm_config_default(meshwm_config** out);
MESHWM_API meshwm_status meshwm_config_load(const char* path, meshwm_config** out);
MESHWM_API meshwm_status meshwm_config_set(meshwm_config* cfg, const char* key, const char* value);
MESHWM_API meshwm_status meshwm_config_dump(const meshwm_config* cfg, char** out);
MESHWM_API void meshwm_config_free(meshwm_config* cfg);

/* LDPC codes */
MESHWM_API meshwm_status meshwm_code_construct(unsigned q, unsigned mu, unsigned eta, uint64_t seed, meshwm_code** out);
MESHWM_API meshwm_status meshwm_code_read_alist(const char* path, meshwm_code** out);
/* Loads the code named by the config's `code` key. */
MESHWM_API meshwm_status meshwm_code_from_config(const meshwm_config* cfg, meshwm_code** out);
MESHWM_API meshwm_status meshwm_code_write_alist(const meshwm_code* code, const char* path);
MESHWM_API meshwm_status meshwm_code_dims(const meshwm_code* code, size_t* n, size_t* k);
/* JSON parameter report; the effective rate uses the config's alphabet (NULL: defaults). */
MESHWM_API meshwm_status meshwm_code_report(const meshwm_code* code, const meshwm_config* cfg, char** json);
MESHWM_API void meshwm_code_free(meshwm_code* code);

/* Watermarking. Payloads are 0/1 strings or "hex:" followed by hex digits. */
MESHWM_API meshwm_status meshwm_embed(const meshwm_mesh* mesh, const char* payload, uint64_t key,
                                      const meshwm_config* cfg, const meshwm_code* code, meshwm_mesh** marked,
                                      char** report_json);
MESHWM_API meshwm_status meshwm_extract_blind(const meshwm_mesh* mesh, uint64_t key, const meshwm_config* cfg,
                                              const meshwm_code* code, char** report_json);
/* `embed_report_json` is the report written by meshwm_embed; only its selection is used. */
MESHWM_API meshwm_status meshwm_extract_oracle(const meshwm_mesh* attacked, const char* embed_report_json,
                                               const meshwm_survival* survival, uint64_t key,
                                               const meshwm_config* cfg, const meshwm_code* code, char** report_json);

/* Attacks */
MESHWM_API meshwm_status meshwm_attack_simplify(const meshwm_mesh* mesh, double face_fraction, meshwm_mesh** out,
                                                meshwm_survival** survival);
MESHWM_API meshwm_status meshwm_attack_region(const meshwm_mesh* mesh, uint32_t center, unsigned hops,
                                              meshwm_mesh** out, meshwm_survival** survival);
MESHWM_API meshwm_status meshwm_survival_read(const char* path, meshwm_survival** out);
MESHWM_API meshwm_status meshwm_survival_write(const meshwm_survival* survival, const char* path);
MESHWM_API meshwm_status meshwm_survival_counts(const meshwm_survival* survival, size_t* original, size_t* survived);
MESHWM_API void meshwm_survival_free(meshwm_survival* survival);

/* Experiments; results are CSV text. */
MESHWM_API meshwm_status meshwm_sweep(const meshwm_code* code, const meshwm_config* cfg, const double* p_list,
                                      size_t p_count, size_t frames, uint64_t seed, char** csv);
MESHWM_API meshwm_status meshwm_capacity(const size_t* alphabet_sizes, size_t size_count, const double* p_list,
                                         size_t p_count, unsigned s_d, double tol, int max_iter, char** csv);

#ifdef __cplusplus
}
#endif

#endif
