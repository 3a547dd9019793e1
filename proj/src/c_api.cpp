// C ABI wrapper around the JSON engine: translates the typed C++ error
// hierarchy into status codes plus structured error documents, and manages
// C-side string ownership.

#include "pfrmt.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "pfrmt/common.hpp"
#include "pfrmt/engine.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;

// Copy into a malloc'd buffer so C callers can release it with free()
// semantics via pfrmt_string_free. Returns nullptr on allocation failure.
char* dup_malloc(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string error_document(const char* type, const std::string& message) {
  nlohmann::json doc;
  doc["schema"] = "pfaffian-rmt/1";
  doc["error"] = {{"type", type}, {"message", message}};
  return doc.dump(2);
}

int eval_impl(const char* request_json, std::string& out, std::string& err) {
  err.clear();
  if (request_json == nullptr) {
    err = "request_json must not be NULL";
    out = error_document("validation", err);
    return kValidation;
  }
  try {
    out = pfrmt::engine_eval(request_json);
    return kOk;
  } catch (const pfrmt::validation_error& e) {
    err = e.what();
    out = error_document("validation", err);
    return kValidation;
  } catch (const pfrmt::numerical_error& e) {
    err = e.what();
    out = error_document("numerical", err);
    return kNumerical;
  } catch (const std::exception& e) {
    err = e.what();
    out = error_document("internal", err);
    return kNumerical;
  }
}

}  // namespace

struct pfrmt_ctx {
  std::string last_error;
};

extern "C" {

const char* pfrmt_version(void) { return pfrmt::engine_version(); }

pfrmt_ctx* pfrmt_ctx_new(void) { return new (std::nothrow) pfrmt_ctx(); }

void pfrmt_ctx_free(pfrmt_ctx* ctx) { delete ctx; }

const char* pfrmt_ctx_last_error(const pfrmt_ctx* ctx) {
  return (ctx != nullptr) ? ctx->last_error.c_str() : "";
}

int pfrmt_ctx_eval(pfrmt_ctx* ctx, const char* request_json, char** response_json) {
  std::string out, err;
  int rc;
  try {
    rc = eval_impl(request_json, out, err);
  } catch (...) {  // out-of-memory while building strings
    if (ctx != nullptr) ctx->last_error = "allocation failure";
    if (response_json != nullptr) *response_json = nullptr;
    return kNumerical;
  }
  if (ctx != nullptr) ctx->last_error = err;
  if (response_json != nullptr) {
    *response_json = dup_malloc(out);
    if (*response_json == nullptr && rc == kOk) {
      if (ctx != nullptr) ctx->last_error = "allocation failure";
      return kNumerical;
    }
  }
  return rc;
}

int pfrmt_eval(const char* request_json, char** response_json) {
  return pfrmt_ctx_eval(nullptr, request_json, response_json);
}

void pfrmt_string_free(char* s) { std::free(s); }

}  // extern "C"
