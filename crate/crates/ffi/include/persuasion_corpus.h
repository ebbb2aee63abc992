/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef PERSUASION_CORPUS_H
#define PERSUASION_CORPUS_H



#include <stddef.h>
#include <stdint.h>

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_UTF8 = 2,
  PC_STATUS_BAD_MAGIC = 3,
  PC_STATUS_BAD_VERSION = 4,
  PC_STATUS_TRUNCATED = 5,
  PC_STATUS_DECODE = 6,
  PC_STATUS_ENCODE = 7,
  PC_STATUS_MALFORMED = 8,
  PC_STATUS_UNKNOWN_ENCODING = 9,
  PC_STATUS_OUT_OF_RANGE = 10,
  PC_STATUS_MODEL = 11,
  PC_STATUS_INVALID_ARGUMENT = 12,
  PC_STATUS_PANIC = 13,
} PcStatus;

/*
 Loaded baseline model.
 */
typedef struct PcModel PcModel;

/*
 Parsed talk table.
 */
typedef struct PcTalkTable PcTalkTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until the
 next call into this library from the same thread; do not free.
 */
const char *pc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *pc_version(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void pc_string_free(char *s);

/*
 Releases a byte buffer returned by this library. NULL is ignored.

 # Safety
 `data`/`len` must be exactly as returned and not yet freed.
 */
void pc_bytes_free(uint8_t *data, size_t len);

/*
 Parses a binary talk table. `encoding` (a WHATWG label such as
 "windows-1252") applies to every entry; NULL selects the per-language
 defaults.

 # Safety
 `data` must point to `len` readable bytes; `encoding` must be NULL or a
 NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_tlk_parse(const uint8_t *data,
                           size_t len,
                           const char *encoding,
                           struct PcTalkTable **out);

/*
 Parses an XML talk table. Missing ids are filled with empty entries.

 # Safety
 `xml` must be a NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_tlk_parse_xml(const char *xml, struct PcTalkTable **out);

/*
 # Safety
 `table` must be NULL or a live handle from `pc_tlk_parse*`.
 */
void pc_tlk_free(struct PcTalkTable *table);

/*
 Number of entries; 0 for NULL.

 # Safety
 `table` must be NULL or a live handle.
 */
size_t pc_tlk_len(const struct PcTalkTable *table);

/*
 Language id from the header; 0 for NULL.

 # Safety
 `table` must be NULL or a live handle.
 */
uint32_t pc_tlk_language_id(const struct PcTalkTable *table);

/*
 Text of entry `str_ref` (empty when the entry has no text).

 # Safety
 `table` must be a live handle; `out` must be writable.
 */
enum PcStatus pc_tlk_text(const struct PcTalkTable *table, uint32_t str_ref, char **out);

/*
 Serializes to canonical binary form with the encodings used to parse it.

 # Safety
 `table` must be a live handle; `out_data` and `out_len` must be writable.
 */
enum PcStatus pc_tlk_write(const struct PcTalkTable *table, uint8_t **out_data, size_t *out_len);

/*
 Renders the table as XML.

 # Safety
 `table` must be a live handle; `out` must be writable.
 */
enum PcStatus pc_tlk_to_xml(const struct PcTalkTable *table, char **out);

/*
 Sets `*is_persuade` to 1 when `text` carries a persuasion tag under the
 default patterns, else 0.

 # Safety
 `text` must be a NUL-terminated string; `is_persuade` must be writable.
 */
enum PcStatus pc_detect_label(const char *text, int *is_persuade);

/*
 Removes bracketed tags and markup and collapses whitespace.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_clean_text(const char *text, char **out);

/*
 Splits `text` into sentences; the result is a JSON array of strings.

 # Safety
 `text` and `language` must be NUL-terminated strings; `out` must be
 writable.
 */
enum PcStatus pc_sentence_tokenize(const char *text, const char *language, char **out_json);

/*
 Loads a baseline model from the bytes of a model file.

 # Safety
 `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PcStatus pc_model_load(const uint8_t *data, size_t len, struct PcModel **out);

/*
 # Safety
 `model` must be NULL or a live handle from `pc_model_load`.
 */
void pc_model_free(struct PcModel *model);

/*
 Persuade probability of `text` and the resulting label (1 = persuade).
 Safe to call from several threads on one model.

 # Safety
 `model` must be a live handle; `text` a NUL-terminated string; both
 output pointers writable.
 */
enum PcStatus pc_model_predict(const struct PcModel *model,
                               const char *text,
                               double *probability,
                               int *is_persuade);

/*
 Metrics report (JSON) for a confusion matrix with persuade as positive.

 # Safety
 `out_json` must be writable.
 */
enum PcStatus pc_metrics_json(uint64_t tp,
                              uint64_t fp,
                              uint64_t fn_count,
                              uint64_t tn,
                              char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERSUASION_CORPUS_H */
