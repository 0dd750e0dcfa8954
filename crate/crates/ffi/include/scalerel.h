/* C ABI for the scalerel numerical laboratory.
 *
 * Every handle returned by this library must be released with the matching
 * _free function; strings returned through char** outputs are released with
 * srl_string_free. Handles are not thread-safe. srl_last_error returns a
 * thread-local message describing the most recent failure on the calling
 * thread; the pointer stays valid until the next failing call there.
 */

#ifndef SCALEREL_H
#define SCALEREL_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. A completed run whose criteria fail still returns SRL_OK;
 * query srl_manifest_pass for the verdict. */
enum {
    SRL_OK = 0,
    SRL_ERR_RUN = 1,    /* numerical or mid-run failure */
    SRL_ERR_CONFIG = 2, /* invalid configuration */
    SRL_ERR_NULL = 3,   /* null pointer argument */
    SRL_ERR_UTF8 = 4    /* argument was not valid UTF-8 */
};

/* Opaque handles. */
typedef struct SrlConfig SrlConfig;
typedef struct SrlManifest SrlManifest;

/* Library version as a static string. */
const char *srl_version(void);

/* Message of the last error on this thread, or an empty string. */
const char *srl_last_error(void);

/* Parse a flat key=value configuration text ('#' starts a comment).
 * The keys 'scenario' and 'seed' are mandatory. */
int srl_config_parse(const char *text, SrlConfig **out);

/* Apply one key=value override to an existing configuration. */
int srl_config_set(SrlConfig *cfg, const char *key, const char *value);

void srl_config_free(SrlConfig *cfg);

/* Run the configured scenario; outputs and a manifest are written to the
 * configured directory and the manifest handle is stored in *out. */
int srl_run(const SrlConfig *cfg, SrlManifest **out);

/* 1 if every scenario criterion passed, else 0. */
int srl_manifest_pass(const SrlManifest *m);

/* 1 if the run stopped before completion, else 0. */
int srl_manifest_incomplete(const SrlManifest *m);

/* Serialize the manifest to JSON; release with srl_string_free. */
int srl_manifest_json(const SrlManifest *m, char **out);

void srl_manifest_free(SrlManifest *m);

void srl_string_free(char *s);

/* Emit gnuplot scripts for a completed run directory. */
int srl_emit_plots(const char *dir);

#ifdef __cplusplus
}
#endif

#endif /* SCALEREL_H */
