#ifndef SEMFUNC_MODEL_IO_HPP
#define SEMFUNC_MODEL_IO_HPP

#include <iosfwd>
#include <string>

#include "semfunc/model.hpp"

namespace semfunc {

// Model files are JSON:
//   { "version": 1,
//     "space": {"dims": D, "cardinality": C},
//     "node_bias": [...],
//     "links": [{"label": "...", "matrix": [[...], ...]}, ...],
//     "vocab": [{"id": "...", "freq": f, "bias": b, "weights": [...]}, ...] }
// Reals are written with 17 significant digits so loading reproduces the
// exact double, and re-serializing a loaded model is byte-identical.

void save_model(const WorldModel& model, std::ostream& out);
void save_model_file(const WorldModel& model, const std::string& path);
std::string model_to_json(const WorldModel& model);

WorldModel load_model(std::istream& in);
WorldModel load_model_file(const std::string& path);
WorldModel model_from_json(const std::string& text);

}  // namespace semfunc

#endif
