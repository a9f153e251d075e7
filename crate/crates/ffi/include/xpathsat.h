#ifndef XPATHSAT_H
#define XPATHSAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Choose XML if the text starts with `<`, native otherwise.
 */
#define XS_FORMAT_AUTO 0

#define XS_FORMAT_NATIVE 1

#define XS_FORMAT_XML 2

typedef enum XsStatus {
  XS_STATUS_OK = 0,
  XS_STATUS_NULL_ARGUMENT = 1,
  XS_STATUS_INVALID_UTF8 = 2,
  XS_STATUS_PARSE_ERROR = 3,
  /*
   The DTD has a rule outside the supported class.
   */
  XS_STATUS_NOT_MRW = 4,
  /*
   The expression uses features neither procedure decides.
   */
  XS_STATUS_UNSUPPORTED_FRAGMENT = 5,
  XS_STATUS_INVALID_ARGUMENT = 6,
  /*
   An internal error; the library state is unaffected.
   */
  XS_STATUS_PANIC = 7,
} XsStatus;

/*
 A parsed DTD prepared for checking.
 */
typedef struct XsDtd XsDtd;

/*
 A parsed XPath expression.
 */
typedef struct XsQuery XsQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The message for the last failure on this thread, or an empty string.
 Valid until the next call into this library on the same thread.
 */
const char *xs_last_error(void);

/*
 Parses a DTD. `root` may be null to use the root named in the text.

 # Safety
 `text` and `root` are null or NUL-terminated; `out` is null or writable.
 */
enum XsStatus xs_dtd_parse(const char *text, uint32_t format, const char *root, struct XsDtd **out);

/*
 # Safety
 `d` is null or a handle from [`xs_dtd_parse`] not yet freed.
 */
void xs_dtd_free(struct XsDtd *d);

/*
 Parses an expression in arrow or named-axis syntax.

 # Safety
 `text` is null or NUL-terminated; `out` is null or writable.
 */
enum XsStatus xs_query_parse(const char *text, struct XsQuery **out);

/*
 # Safety
 `q` is null or a handle from [`xs_query_parse`] not yet freed.
 */
void xs_query_free(struct XsQuery *q);

/*
 Decides whether some document valid for `dtd` has a node selected by
 `query`.

 # Safety
 `dtd` and `query` are null or live handles; `out` is null or writable.
 */
enum XsStatus xs_satisfiable(const struct XsDtd *dtd, const struct XsQuery *query, bool *out);

/*
 The full verdict as a JSON object, with intermediate states when
 `trace` is set.

 # Safety
 `dtd` and `query` are null or live handles; `out` is null or writable.
 */
enum XsStatus xs_check_json(const struct XsDtd *dtd,
                            const struct XsQuery *query,
                            bool trace,
                            char **out);

/*
 Searches for a witness document. `rep` 0 selects the default for the
 query. On success `*out` is the witness term, or null if none was found
 within the bounds.

 # Safety
 `dtd` and `query` are null or live handles; `out` is null or writable.
 */
enum XsStatus xs_oracle(const struct XsDtd *dtd,
                        const struct XsQuery *query,
                        size_t depth,
                        size_t rep,
                        char **out);

/*
 Whether two single-character-symbol content models denote the same
 language.

 # Safety
 `left` and `right` are null or NUL-terminated; `out` is null or writable.
 */
enum XsStatus xs_equivalent(const char *left, const char *right, bool *out);

/*
 The simplified form of an MRW content model with single-character
 symbols.

 # Safety
 `model` is null or NUL-terminated; `out` is null or writable.
 */
enum XsStatus xs_delta(const char *model, char **out);

/*
 # Safety
 `s` is null or a string returned by this library, not yet freed.
 */
void xs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XPATHSAT_H */
