#ifndef POISSONSYM_H
#define POISSONSYM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. Values are stable.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_UTF8 = 2,
  PS_STATUS_PARSE = 3,
  PS_STATUS_EVAL = 4,
  PS_STATUS_DIMENSION = 5,
  PS_STATUS_INVALID_ARGUMENT = 6,
  PS_STATUS_PRECONDITION = 7,
  PS_STATUS_UNKNOWN = 8,
  PS_STATUS_CONFIG = 9,
  PS_STATUS_IO = 10,
  PS_STATUS_PANIC = 11,
} PsStatus;

/**
 * Infinitesimal Poisson action with its Lie algebra.
 */
typedef struct PsAction PsAction;

/**
 * Parsed scalar expression in `x0, x1, …` and `t`.
 */
typedef struct PsExpression PsExpression;

/**
 * Chart Poisson manifold.
 */
typedef struct PsManifold PsManifold;

/**
 * Cotangent path sampled on a uniform grid over `[0, 1]`.
 */
typedef struct PsPath PsPath;

/**
 * Scenario report.
 */
typedef struct PsReport PsReport;

/**
 * Numeric fields of one report record.
 */
typedef struct PsRecord {
  double residual;
  double tolerance;
  double runtime_ms;
  bool pass;
} PsRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ps_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next library call on the same thread.
 */
const char *ps_last_error(void);

/**
 * Releases a string returned by the library.
 */
void ps_string_free(char *s);

/**
 * Parses an s-expression such as `(+ (* x0 x1) (sin t))`.
 */
enum PsStatus ps_expression_parse(const char *src, struct PsExpression **out);

void ps_expression_free(struct PsExpression *e);

/**
 * Evaluates at `x[0..n]` (time `t = 0`).
 */
enum PsStatus ps_expression_eval(const struct PsExpression *e,
                                 const double *x,
                                 size_t n,
                                 double *out);

/**
 * Builds a manifold from its JSON description, e.g.
 * `{"type": "lie-poisson", "algebra": {"type": "so3"}}`.
 */
enum PsStatus ps_manifold_from_json(const char *spec, struct PsManifold **out);

void ps_manifold_free(struct PsManifold *m);

/**
 * Chart dimension, or 0 for a null handle.
 */
size_t ps_manifold_dim(const struct PsManifold *m);

/**
 * Writes the `n × n` bivector matrix at `x` in row-major order.
 */
enum PsStatus ps_manifold_bivector(const struct PsManifold *m,
                                   const double *x,
                                   size_t n,
                                   double *out);

/**
 * `{f, g}(x)`.
 */
enum PsStatus ps_manifold_bracket(const struct PsManifold *m,
                                  const struct PsExpression *f,
                                  const struct PsExpression *g,
                                  const double *x,
                                  size_t n,
                                  double *out);

/**
 * Largest Jacobiator over coordinate triples at `x`.
 */
enum PsStatus ps_manifold_jacobiator(const struct PsManifold *m,
                                     const double *x,
                                     size_t n,
                                     double *out);

/**
 * `out = Π(x) a`.
 */
enum PsStatus ps_manifold_sharp(const struct PsManifold *m,
                                const double *x,
                                const double *a,
                                size_t n,
                                double *out);

/**
 * Builds an action from its JSON description. Builtin actions such as
 * `{"type": "c2-circle"}` carry their own manifold and ignore `manifold`,
 * which may be null; `trivial` and `generators` require it.
 */
enum PsStatus ps_action_from_json(const char *spec,
                                  const struct PsManifold *manifold,
                                  struct PsAction **out);

void ps_action_free(struct PsAction *a);

/**
 * Lie algebra dimension, or 0 for a null handle.
 */
size_t ps_action_algebra_dim(const struct PsAction *a);

/**
 * New handle to the manifold the action lives on.
 */
enum PsStatus ps_action_manifold(const struct PsAction *a, struct PsManifold **out);

/**
 * Integrates `ẋ = Π(x) a(x, t)` from `x0` over `steps` RK4 steps, with the
 * covector given by `n` expression handles.
 */
enum PsStatus ps_path_integrate(const struct PsManifold *m,
                                const struct PsExpression *const *covector,
                                const double *x0,
                                size_t n,
                                size_t steps,
                                struct PsPath **out);

void ps_path_free(struct PsPath *p);

/**
 * Number of grid steps, or 0 for a null handle.
 */
size_t ps_path_steps(const struct PsPath *p);

/**
 * Copies the base point at the start and end of the path. Either output may be null.
 */
enum PsStatus ps_path_endpoints(const struct PsPath *p, double *start, double *end, size_t n);

/**
 * Concatenation `a` then `b`; `b` must start where `a` ends.
 */
enum PsStatus ps_path_concatenate(const struct PsPath *a,
                                  const struct PsPath *b,
                                  struct PsPath **out);

/**
 * Lifted momentum of a path: `out[k] = ∫ ⟨a, X_k⟩ dt` for each generator.
 */
enum PsStatus ps_momentum_lifted(const struct PsAction *action,
                                 const struct PsPath *path,
                                 double *out,
                                 size_t n);

/**
 * Cocycle defect of the lifted momentum on a composable pair.
 */
enum PsStatus ps_momentum_cocycle(const struct PsAction *action,
                                  const struct PsPath *a,
                                  const struct PsPath *b,
                                  double *out);

/**
 * Runs a builtin scenario (or `all`) and/or a JSON config. Either argument
 * may be null but not both.
 */
enum PsStatus ps_scenario_run(const char *name, const char *config_json, struct PsReport **out);

void ps_report_free(struct PsReport *r);

/**
 * Number of records, or 0 for a null handle.
 */
size_t ps_report_len(const struct PsReport *r);

/**
 * Number of failed records, or 0 for a null handle.
 */
size_t ps_report_failures(const struct PsReport *r);

enum PsStatus ps_report_record(const struct PsReport *r, size_t index, struct PsRecord *out);

/**
 * Serializes the report as JSON (or CSV when `csv` is set); release the
 * string with `ps_string_free`.
 */
enum PsStatus ps_report_serialize(const struct PsReport *r, bool csv, bool no_timing, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POISSONSYM_H */
