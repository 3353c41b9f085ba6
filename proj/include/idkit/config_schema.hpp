#pragma once
// Validator for the subset of JSON Schema used by the experiment schema:
// type, const, enum, required, properties, additionalProperties, items,
// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
// minLength, pattern, allOf, oneOf, if/then/else, and "$ref" to "#/$defs/<name>".
//
// One extension keyword: "x-lessOrEqual": ["a", "b"] on an object requires
// a <= b whenever both numeric properties are present.

#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace idkit {

struct SchemaViolation {
  std::string path;  // JSON pointer into the instance, "" for the root
  std::string message;
};

class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema) : schema_(std::move(schema)) {}

  std::vector<SchemaViolation> validate(const nlohmann::json& instance) const {
    std::vector<SchemaViolation> out;
    check(schema_, instance, "", out);
    return out;
  }

  bool accepts(const nlohmann::json& instance) const { return validate(instance).empty(); }

 private:
  static bool has_type(const nlohmann::json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "number") return v.is_number();
    if (type == "integer") {
      if (v.is_number_integer()) return true;
      return v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>()));
    }
    return false;
  }

  static std::string describe(const nlohmann::json& v) {
    std::string s = v.dump();
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
  }

  void check(const nlohmann::json& s, const nlohmann::json& v, const std::string& path,
             std::vector<SchemaViolation>& out) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) out.push_back({path, "not allowed"});
      return;
    }
    if (s.contains("$ref")) {
      const auto ref = s["$ref"].get<std::string>();
      const std::string prefix = "#/$defs/";
      if (ref.rfind(prefix, 0) != 0 || !schema_.contains("$defs") || !schema_["$defs"].contains(ref.substr(prefix.size())))
        throw std::invalid_argument("unresolvable schema reference " + ref);
      check(schema_["$defs"][ref.substr(prefix.size())], v, path, out);
    }
    if (s.contains("type")) {
      const auto& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = has_type(v, t.get<std::string>());
      else
        for (const auto& alt : t) ok = ok || has_type(v, alt.get<std::string>());
      if (!ok) {
        out.push_back({path, "expected type " + t.dump()});
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) out.push_back({path, "must equal " + s["const"].dump()});
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || v == e;
      if (!found) out.push_back({path, describe(v) + " is not one of " + s["enum"].dump()});
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) out.push_back({path, "must be >= " + s["minimum"].dump()});
      if (s.contains("maximum") && x > s["maximum"].get<double>()) out.push_back({path, "must be <= " + s["maximum"].dump()});
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        out.push_back({path, "must be > " + s["exclusiveMinimum"].dump()});
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
        out.push_back({path, "must be < " + s["exclusiveMaximum"].dump()});
    }
    if (v.is_string()) {
      const auto& str = v.get_ref<const std::string&>();
      if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>())
        out.push_back({path, "string shorter than " + s["minLength"].dump()});
      if (s.contains("pattern") && !std::regex_search(str, std::regex(s["pattern"].get<std::string>())))
        out.push_back({path, "does not match " + s["pattern"].dump()});
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        out.push_back({path, "needs at least " + s["minItems"].dump() + " items"});
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
        out.push_back({path, "allows at most " + s["maxItems"].dump() + " items"});
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "/" + std::to_string(i), out);
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& key : s["required"])
          if (!v.contains(key.get<std::string>())) out.push_back({path + "/" + key.get<std::string>(), "is required"});
      const nlohmann::json* props = s.contains("properties") ? &s["properties"] : nullptr;
      for (const auto& [key, child] : v.items()) {
        if (props && props->contains(key)) check((*props)[key], child, path + "/" + key, out);
        else if (s.contains("additionalProperties")) check(s["additionalProperties"], child, path + "/" + key, out);
      }
      if (s.contains("x-lessOrEqual")) {
        const auto a = s["x-lessOrEqual"][0].get<std::string>();
        const auto b = s["x-lessOrEqual"][1].get<std::string>();
        if (v.contains(a) && v.contains(b) && v[a].is_number() && v[b].is_number() && v[a].get<double>() > v[b].get<double>())
          out.push_back({path + "/" + a, "must be <= " + b});
      }
    }
    if (s.contains("allOf"))
      for (const auto& sub : s["allOf"]) check(sub, v, path, out);
    if (s.contains("oneOf")) {
      std::size_t matches = 0;
      for (const auto& sub : s["oneOf"]) {
        std::vector<SchemaViolation> tmp;
        check(sub, v, path, tmp);
        matches += tmp.empty();
      }
      if (matches != 1) out.push_back({path, "must match exactly one alternative (matched " + std::to_string(matches) + ")"});
    }
    if (s.contains("if")) {
      std::vector<SchemaViolation> tmp;
      check(s["if"], v, path, tmp);
      if (tmp.empty() && s.contains("then")) check(s["then"], v, path, out);
      if (!tmp.empty() && s.contains("else")) check(s["else"], v, path, out);
    }
  }

  nlohmann::json schema_;
};

}  // namespace idkit
