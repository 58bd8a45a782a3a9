/* C interface to the CMM forecasting engine.
 *
 * Every function returns CMM_OK (0) on success, CMM_EINVAL (1) on input
 * validation failure or CMM_ERUNTIME (2) on runtime failure; cmm_last_error()
 * returns a thread-local message for the most recent failure. Strings handed
 * out through char** are heap-allocated and must be released with
 * cmm_string_free(); series handles with cmm_series_free().
 */
#ifndef CMM_CMM_H
#define CMM_CMM_H

#ifdef __cplusplus
extern "C" {
#endif

#define CMM_OK 0
#define CMM_EINVAL 1
#define CMM_ERUNTIME 2

typedef struct cmm_series cmm_series;

const char* cmm_version(void);
const char* cmm_last_error(void);
void cmm_string_free(char* s);

/* ---- series ---- */
int cmm_series_load_csv(const char* path, int period, cmm_series** out);
int cmm_series_parse_csv(const char* text, int period, const char* id, cmm_series** out);
int cmm_series_from_synth_json(const char* spec_json, cmm_series** out);
int cmm_series_to_csv(const cmm_series* s, char** out_csv);
int cmm_series_length(const cmm_series* s, int* out);
int cmm_series_period(const cmm_series* s, int* out);
const char* cmm_series_id(const cmm_series* s);
void cmm_series_free(cmm_series* s);

/* ---- engine ---- */

/* Fully-populated config echo: parses config_json (may be "{}" or NULL for
 * all defaults), validates and returns every field made explicit. */
int cmm_resolve_config(const char* config_json, char** out_json);

/* Built-in model registry for a period, as a JSON array of model records. */
int cmm_registry_json(int period, char** out_json);

/* date,D,T,S,IC audit table of the multiplicative decomposition. */
int cmm_decompose_csv(const cmm_series* s, char** out_csv);

/* h-step forecast of the raw series from one registry model ('T'/'S'/'I' +
 * expert id) or from the grid-searched Holt-Winters baseline. CSV: date,forecast. */
int cmm_forecast_model_csv(const cmm_series* s, const char* config_json, char role_tag,
                           int expert_id, int horizon, char** out_csv);
int cmm_forecast_hw_csv(const cmm_series* s, int horizon, char** out_csv);

/* Mining half of the pipeline. out_summary_json carries the consistent good /
 * bad sets, closed itemsets and window bookkeeping; out_db_text the good-tail
 * transaction file ("T:5 S:12 I:3" per line). Either out pointer may be NULL. */
int cmm_mine(const cmm_series* s, const char* config_json, char** out_summary_json,
             char** out_db_text);

/* Per-point expert ranking audit rows (point, ids, ape). Fails when the dump
 * would exceed max_rows. */
int cmm_rankings_csv(const cmm_series* s, const char* config_json, long max_rows, char** out_csv);

/* End-to-end evaluation; out_plot_csv may be NULL. */
int cmm_evaluate(const cmm_series* s, const char* config_json, char** out_report_json,
                 char** out_plot_csv);

/* Evaluation of `target` reusing `source`'s mined consistent sets. */
int cmm_transfer(const cmm_series* source, const cmm_series* target, const char* config_json,
                 char** out_report_json, char** out_plot_csv);

/* ---- inter-series similarity ---- */
int cmm_sfd_pair(const cmm_series* a, const cmm_series* b, const char* config_json, int* out_raw,
                 double* out_normalized);
int cmm_sfd_matrix(const cmm_series* const* list, int count, const char* config_json,
                   char** out_matrix_csv, char** out_groups_json);

/* ---- misc ---- */

/* FNV-1a 64-bit digest of a file's bytes, as 16 hex characters. */
int cmm_file_digest(const char* path, char** out_hex);

#ifdef __cplusplus
}
#endif

#endif /* CMM_CMM_H */
