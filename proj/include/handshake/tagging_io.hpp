// JSON-lines serialization of handshaking taggings.
//
//   {"n":3,"relations":["r0"],"eh2et":[0,1,0,0,0,0],"sh2oh":[[...]],"st2ot":[[...]]}
//
// Tag sequences are in flat-index order; relations are listed in schema order.
// An optional "tokens" array carries the sentence surface form.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handshake/core.hpp"
#include "handshake/decoder.hpp"

namespace handshake {

struct SerializedTagging {
  HandshakingTagging tagging;
  std::vector<std::string> relations;
  std::optional<std::vector<std::string>> tokens;
};

namespace detail {

inline nlohmann::ordered_json tags_to_json(const TagSequence &seq) {
  auto out = nlohmann::ordered_json::array();
  for (LinkTag t : seq) out.push_back(to_int(t));
  return out;
}

inline TagSequence tags_from_json(const nlohmann::ordered_json &arr, const char *field) {
  if (!arr.is_array()) {
    throw Error(ErrorKind::kParse, std::string("field '") + field + "' must be an array");
  }
  TagSequence out;
  out.reserve(arr.size());
  for (const auto &v : arr) {
    if (!v.is_number_integer()) {
      throw Error(ErrorKind::kParse, std::string("non-integer tag in '") + field + "'");
    }
    out.push_back(link_tag_from_int(v.get<long long>()));
  }
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json tagging_to_json(
    const HandshakingTagging &tagging, const RelationSchema &schema,
    const std::optional<std::vector<std::string>> &tokens = std::nullopt) {
  tagging.validate(schema.size());
  nlohmann::ordered_json j;
  j["n"] = tagging.n;
  j["relations"] = schema.names();
  j["eh2et"] = detail::tags_to_json(tagging.eh2et);
  auto sh = nlohmann::ordered_json::array();
  auto st = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < tagging.num_relations(); ++r) {
    sh.push_back(detail::tags_to_json(tagging.sh2oh[r]));
    st.push_back(detail::tags_to_json(tagging.st2ot[r]));
  }
  j["sh2oh"] = std::move(sh);
  j["st2ot"] = std::move(st);
  if (tokens) j["tokens"] = *tokens;
  return j;
}

inline std::string tagging_to_line(const HandshakingTagging &tagging, const RelationSchema &schema,
                                   const std::optional<std::vector<std::string>> &tokens =
                                       std::nullopt) {
  return tagging_to_json(tagging, schema, tokens).dump();
}

/// Parses one line. Strict mode rejects EH-to-ET tag 2 as corrupt data.
inline SerializedTagging tagging_from_line(const std::string &line,
                                           Strictness mode = Strictness::kStrict) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kParse, std::string("malformed tagging line: ") + e.what());
  }
  for (const char *field : {"n", "relations", "eh2et", "sh2oh", "st2ot"}) {
    if (!j.contains(field)) {
      throw Error(ErrorKind::kParse, std::string("tagging line lacks field '") + field + "'");
    }
  }
  if (!j["n"].is_number_unsigned() && !j["n"].is_number_integer()) {
    throw Error(ErrorKind::kParse, "field 'n' must be an integer");
  }
  const long long n = j["n"].get<long long>();
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "field 'n' must be >= 1");

  SerializedTagging out;
  out.relations = j["relations"].get<std::vector<std::string>>();
  out.tagging.n = static_cast<std::size_t>(n);
  out.tagging.eh2et = detail::tags_from_json(j["eh2et"], "eh2et");
  if (!j["sh2oh"].is_array() || !j["st2ot"].is_array()) {
    throw Error(ErrorKind::kParse, "fields 'sh2oh' and 'st2ot' must be arrays of arrays");
  }
  for (const auto &seq : j["sh2oh"]) out.tagging.sh2oh.push_back(detail::tags_from_json(seq, "sh2oh"));
  for (const auto &seq : j["st2ot"]) out.tagging.st2ot.push_back(detail::tags_from_json(seq, "st2ot"));
  if (j.contains("tokens")) out.tokens = j["tokens"].get<std::vector<std::string>>();

  out.tagging.validate(out.relations.size());
  if (mode == Strictness::kStrict) {
    for (LinkTag t : out.tagging.eh2et) {
      if (t == LinkTag::kReversed) {
        throw Error(ErrorKind::kInvalidInput, "EH-to-ET sequence contains tag 2 (corrupt data)");
      }
    }
  }
  return out;
}

}  // namespace handshake
