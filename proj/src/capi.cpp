#include "gaussito/gaussito.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "gaussito/error.hpp"
#include "gaussito/gaussproc.hpp"
#include "gaussito/heatkernel.hpp"
#include "gaussito/itoverify.hpp"
#include "gaussito/scenario.hpp"

struct gaussito_process {
  gaussito::ProcessSpec spec;
};

struct gaussito_run {
  gaussito::RunResult result;
};

namespace {

thread_local std::string g_last_error;

gaussito_status fail(gaussito_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class F>
gaussito_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return GAUSSITO_OK;
  } catch (const gaussito::Error& e) {
    return fail(static_cast<gaussito_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GAUSSITO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GAUSSITO_ERR_INTERNAL, e.what());
  }
}

gaussito::Side to_side(int side) {
  if (side < 0) return gaussito::Side::left;
  if (side > 0) return gaussito::Side::right;
  return gaussito::Side::at;
}

void require(const void* p, const char* name) {
  if (!p) throw gaussito::InvalidArgument(std::string(name) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* gaussito_version(void) { return GAUSSITO_VERSION; }

const char* gaussito_last_error_message(void) { return g_last_error.c_str(); }

gaussito_status gaussito_process_create(const char* model_id, const char* params_json,
                                        gaussito_process** out) {
  return guarded([&] {
    require(model_id, "model_id");
    require(out, "out");
    *out = nullptr;
    const gaussito::ModelParams p = gaussito::parse_model_params(params_json ? params_json : "");
    *out = new gaussito_process{gaussito::catalog(model_id, p)};
  });
}

void gaussito_process_destroy(gaussito_process* process) { delete process; }

gaussito_status gaussito_process_covariance(const gaussito_process* process, double t, int side_t,
                                            double s, int side_s, double* out) {
  return guarded([&] {
    require(process, "process");
    require(out, "out");
    *out = process->spec.covariance(gaussito::Instant{t, to_side(side_t)},
                                    gaussito::Instant{s, to_side(side_s)});
  });
}

gaussito_status gaussito_process_lambda(const gaussito_process* process, double* out) {
  return guarded([&] {
    require(process, "process");
    require(out, "out");
    *out = process->spec.lambda();
  });
}

gaussito_status gaussito_process_variance(const gaussito_process* process, double t, double* out) {
  return guarded([&] {
    require(process, "process");
    require(out, "out");
    *out = process->spec.variance()(t);
  });
}

gaussito_status gaussito_planar_qv(const gaussito_process* process, size_t n_intervals,
                                   double* out) {
  return guarded([&] {
    require(process, "process");
    require(out, "out");
    *out = gaussito::planar_qv_sum(
        process->spec, gaussito::Partition::uniform(process->spec.horizon(), n_intervals));
  });
}

gaussito_status gaussito_psi(const char* function_id, double a, double t, double x, int order,
                             double* out) {
  return guarded([&] {
    require(function_id, "function_id");
    require(out, "out");
    *out = gaussito::psi(gaussito::make_test_function(function_id, a), t, x, order);
  });
}

gaussito_status gaussito_ito_residual(const gaussito_process* process, const char* function_id,
                                      double a, const double* coeffs, const double* times,
                                      const int* sides, size_t n_terms, gaussito_ito_terms* out) {
  return guarded([&] {
    require(process, "process");
    require(function_id, "function_id");
    require(out, "out");
    if (n_terms > 0) {
      require(coeffs, "coeffs");
      require(times, "times");
    }
    std::vector<gaussito::CmTerm> h;
    for (size_t i = 0; i < n_terms; ++i)
      h.push_back({coeffs[i], {times[i], sides ? to_side(sides[i]) : gaussito::Side::at}});
    const gaussito::ItoCase c("capi", process->spec, gaussito::make_test_function(function_id, a),
                              std::move(h));
    const gaussito::ItoTerms t = gaussito::ito_stransform_residual(c);
    *out = gaussito_ito_terms{t.lhs,          t.ys_integral, t.dv_integral, t.left_jump_sum,
                              t.right_jump_sum, t.rhs,       t.residual,    t.converged ? 1 : 0};
  });
}

gaussito_status gaussito_scenario_run(const char* scenario_path, const char* out_dir, int has_seed,
                                      uint64_t seed, unsigned jobs, gaussito_run** out) {
  return guarded([&] {
    require(scenario_path, "scenario_path");
    require(out, "out");
    *out = nullptr;
    gaussito::RunOptions options;
    if (out_dir) options.out_dir = out_dir;
    if (has_seed) options.seed = seed;
    options.jobs = jobs == 0 ? 1 : jobs;
    *out = new gaussito_run{gaussito::run_scenario_file(scenario_path, options)};
  });
}

int gaussito_run_exit_code(const gaussito_run* run) { return run ? run->result.exit_code : 2; }

const char* gaussito_run_summary(const gaussito_run* run) {
  return run ? run->result.summary.c_str() : "";
}

const char* gaussito_run_report_path(const gaussito_run* run) {
  return run ? run->result.report_path.c_str() : "";
}

void gaussito_run_destroy(gaussito_run* run) { delete run; }

gaussito_status gaussito_catalog_text(char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    const std::string text = gaussito::catalog_text();
    if (needed) *needed = text.size() + 1;
    if (buf && capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

}  // extern "C"
