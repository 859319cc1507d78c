#include "semfunc/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "semfunc/errors.hpp"

namespace semfunc {

namespace {

// %.17g is the shortest fixed precision that round-trips every double.
void write_real(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void write_string(std::ostream& out, const std::string& s) {
  out << '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"':
        out << "\\\"";
        break;
      case '\\':
        out << "\\\\";
        break;
      case '\n':
        out << "\\n";
        break;
      case '\t':
        out << "\\t";
        break;
      case '\r':
        out << "\\r";
        break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

void write_real_array(std::ostream& out, const std::vector<double>& xs) {
  out << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) {
      out << ',';
    }
    write_real(out, xs[i]);
  }
  out << ']';
}

}  // namespace

void save_model(const WorldModel& model, std::ostream& out) {
  model.validate();
  out << "{\"version\":1,\"space\":{\"dims\":" << model.space.dims
      << ",\"cardinality\":" << model.space.cardinality << "},\"node_bias\":";
  write_real_array(out, model.node_bias);
  out << ",\"links\":[";
  bool first = true;
  for (const auto& [label, matrix] : model.links) {
    if (!first) {
      out << ',';
    }
    first = false;
    out << "{\"label\":";
    write_string(out, label);
    out << ",\"matrix\":[";
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (r) {
        out << ',';
      }
      out << '[';
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        if (c) {
          out << ',';
        }
        write_real(out, matrix(r, c));
      }
      out << ']';
    }
    out << "]}";
  }
  out << "],\"vocab\":[";
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    if (i) {
      out << ',';
    }
    const Predicate& p = model.entry(i);
    out << "{\"id\":";
    write_string(out, model.ids()[i]);
    out << ",\"freq\":";
    write_real(out, p.frequency);
    out << ",\"bias\":";
    write_real(out, p.function.bias);
    out << ",\"weights\":";
    write_real_array(out, p.function.weights);
    out << '}';
  }
  out << "]}\n";
}

void save_model_file(const WorldModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open '" + path + "' for writing");
  }
  save_model(model, out);
  out.flush();
  if (!out) {
    throw InputError("failed writing model to '" + path + "'");
  }
}

std::string model_to_json(const WorldModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

namespace {

using nlohmann::json;

std::vector<double> read_real_array(const json& j, const char* what) {
  if (!j.is_array()) {
    throw InputError(std::string("model field '") + what +
                     "' must be an array of numbers");
  }
  std::vector<double> xs;
  xs.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw InputError(std::string("model field '") + what +
                       "' must contain only numbers");
    }
    xs.push_back(v.get<double>());
  }
  return xs;
}

}  // namespace

WorldModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("version", 0) != 1) {
      throw InputError("unsupported model version");
    }
    WorldModel model;
    model.space.dims = doc.at("space").at("dims").get<std::size_t>();
    model.space.cardinality =
        doc.at("space").at("cardinality").get<std::size_t>();
    model.node_bias = read_real_array(doc.at("node_bias"), "node_bias");
    for (const auto& link : doc.at("links")) {
      const std::string label = link.at("label").get<std::string>();
      const auto& rows = link.at("matrix");
      Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> row = read_real_array(rows[r], "matrix");
        if (row.size() != m.cols()) {
          throw InputError("link '" + label + "' matrix is ragged");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
          m(r, c) = row[c];
        }
      }
      if (!model.links.emplace(label, std::move(m)).second) {
        throw InputError("duplicate link label '" + label + "'");
      }
    }
    for (const auto& entry : doc.at("vocab")) {
      Predicate p;
      p.frequency = entry.at("freq").get<double>();
      p.function.bias = entry.at("bias").get<double>();
      p.function.weights = read_real_array(entry.at("weights"), "weights");
      model.add_predicate(entry.at("id").get<std::string>(), std::move(p));
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON has missing or mistyped fields: ") +
                     e.what());
  }
}

WorldModel load_model(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

WorldModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open model file '" + path + "'");
  }
  return load_model(in);
}

}  // namespace semfunc
