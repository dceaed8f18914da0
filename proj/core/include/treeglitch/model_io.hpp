/**
 * \file model_io.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_MODEL_IO_HPP
#define TREEGLITCH_MODEL_IO_HPP

#include <iosfwd>
#include <string>

#include "treeglitch/ensemble.hpp"

namespace treeglitch {

enum class ModelFormat {
    native,       ///< this project's JSON model format
    xgboost_dump, ///< xgboost's `dump_model(..., dump_format="json")` array
};

struct LoadOptions {
    /// Default per-feature bounds when the file carries none: [0,1] if set,
    /// otherwise [min threshold - 1, max threshold + 1].
    bool normalized = false;
};

/** Parses a model file and validates all type invariants. */
Ensemble load_ensemble(const std::string& path, ModelFormat format, const LoadOptions& = {});

Ensemble parse_native_model(std::istream& in, const LoadOptions& = {});
Ensemble parse_xgboost_dump(std::istream& in, const LoadOptions& = {});

/** Writes the native format; deterministic byte-for-byte for equal inputs. */
void save_ensemble(const Ensemble& m, const std::string& path);
std::string to_native_json(const Ensemble& m);

ModelFormat parse_model_format(const std::string& name);

} // namespace treeglitch

#endif // TREEGLITCH_MODEL_IO_HPP
