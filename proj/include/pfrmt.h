#ifndef PFRMT_H
#define PFRMT_H

/* C API for the pfrmt shared library.
 *
 * All functionality is exposed through one JSON-in / JSON-out entry point.
 * Requests and responses follow the "pfaffian-rmt/1" schema documented in
 * README.md (commands: partition, kpoint, micro, wilson, verify, converge).
 *
 * Status codes returned by the eval functions:
 *   0  success               — *response_json holds the result document
 *   1  validation error      — malformed request or out-of-domain parameters
 *   2  numerical error       — a computation could not meet its pinned
 *                              accuracy contract (quadrature non-convergence,
 *                              antisymmetry breach, ...)
 *
 * On failure *response_json holds a structured error document
 *   { "schema": "pfaffian-rmt/1",
 *     "error": { "type": "validation" | "numerical" | "internal",
 *                "message": "..." } }
 * ("internal" is reserved for unexpected conditions and is reported with
 * status 2).  Every string returned through an out-parameter is allocated
 * by the library and must be released with pfrmt_string_free().
 *
 * Evaluation is deterministic: byte-identical requests produce
 * byte-identical responses, Monte Carlo included (counter-based seeded
 * stream).  A context is NOT thread-safe; use one context per thread or
 * the stateless pfrmt_eval().
 */

#ifdef __cplusplus
extern "C" {
#endif

/* Library semantic version, e.g. "1.0.0". Static storage; do not free. */
const char* pfrmt_version(void);

/* Opaque evaluation context. Holds the last error message. */
typedef struct pfrmt_ctx pfrmt_ctx;

/* Create a context. Returns NULL only on allocation failure. */
pfrmt_ctx* pfrmt_ctx_new(void);

/* Destroy a context created by pfrmt_ctx_new. NULL is a no-op. */
void pfrmt_ctx_free(pfrmt_ctx* ctx);

/* Message of the most recent failed pfrmt_ctx_eval on this context, or ""
 * if the last call succeeded. Owned by the context: valid until the next
 * eval on the same context or pfrmt_ctx_free. Do not free. */
const char* pfrmt_ctx_last_error(const pfrmt_ctx* ctx);

/* Evaluate one JSON request. Returns a status code (see above) and writes
 * a malloc'd JSON document (result or error object) to *response_json.
 * response_json may be NULL if the caller only wants the status; ctx may
 * be NULL, in which case no error message is retained. */
int pfrmt_ctx_eval(pfrmt_ctx* ctx, const char* request_json, char** response_json);

/* Stateless variant of pfrmt_ctx_eval (no context, no retained error). */
int pfrmt_eval(const char* request_json, char** response_json);

/* Release a string allocated by this library. NULL is a no-op. */
void pfrmt_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PFRMT_H */
