#include "dermveil_app/config.hpp"

#include <string>

#include "dermveil/csv.hpp"
#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"

namespace dermveil::app {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int to_int(std::string_view key, std::string_view value) {
  try {
    const long long v = parse_integer(value, key);
    if (v < INT32_MIN || v > INT32_MAX) throw Error(ErrorKind::Parse, "out of range");
    return static_cast<int>(v);
  } catch (const Error&) {
    throw Error(ErrorKind::InvalidArgument,
                "config " + std::string(key) + ": expected an integer, got '" +
                    std::string(value) + "'");
  }
}

double to_double(std::string_view key, std::string_view value) {
  try {
    return parse_number(value, key);
  } catch (const Error&) {
    throw Error(ErrorKind::InvalidArgument,
                "config " + std::string(key) + ": expected a number, got '" +
                    std::string(value) + "'");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, "config: " + what);
}

}  // namespace

PipelineConfig PipelineConfig::compact() {
  PipelineConfig c;
  c.confidence = 0.1;
  c.min_leaf = 100;
  return c;
}

PipelineConfig PipelineConfig::profile(std::string_view name) {
  if (name == "default") return defaults();
  if (name == "compact") return compact();
  throw Error(ErrorKind::InvalidArgument,
              "profile: expected 'compact' or 'default', got '" + std::string(name) + "'");
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  if (key == "ring_skip") {
    ring_skip = to_double(key, value);
  } else if (key == "ring_take") {
    ring_take = to_double(key, value);
  } else if (key == "glcm_levels") {
    glcm_levels = to_int(key, value);
  } else if (key == "window") {
    window = to_int(key, value);
  } else if (key == "majority_window") {
    majority_window = to_int(key, value);
  } else if (key == "confidence") {
    confidence = to_double(key, value);
  } else if (key == "min_leaf") {
    min_leaf = to_int(key, value);
  } else if (key == "max_depth") {
    if (value == "none") {
      max_depth.reset();
    } else {
      max_depth = to_int(key, value);
    }
  } else if (key == "per_class") {
    per_class = to_int(key, value);
  } else if (key == "seed") {
    try {
      const long long v = parse_integer(value, key);
      require(v >= 0, "seed must be non-negative");
      seed = static_cast<std::uint64_t>(v);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) throw;
      throw Error(ErrorKind::InvalidArgument,
                  "config seed: expected a non-negative integer, got '" + std::string(value) + "'");
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "config: unknown key '" + std::string(key) + "'");
  }
}

void PipelineConfig::validate() const {
  require(ring_skip > 0.0, "ring_skip must be > 0");
  require(ring_take > 0.0, "ring_take must be > 0");
  require(glcm_levels >= 2, "glcm_levels must be >= 2");
  require(window >= 3 && window % 2 == 1, "window must be odd and >= 3");
  require(majority_window >= 3 && majority_window % 2 == 1,
          "majority_window must be odd and >= 3");
  require(confidence > 0.0 && confidence <= 1.0, "confidence must lie in (0, 1]");
  require(min_leaf >= 1, "min_leaf must be >= 1");
  require(!max_depth || *max_depth >= 0, "max_depth must be >= 0");
  require(per_class >= 1, "per_class must be >= 1");
}

InductionConfig PipelineConfig::induction() const {
  InductionConfig c;
  c.confidence = confidence;
  c.min_leaf = min_leaf;
  c.max_depth = max_depth;
  c.seed = seed;
  return c;
}

void apply_config_text(PipelineConfig& config, std::string_view text, std::string_view source) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line_no) +
                                        ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      config.validate();
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  apply_config_text(config, read_file(path), path.string());
}

}  // namespace dermveil::app
