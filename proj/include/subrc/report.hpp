#pragma once

#include <string>
#include <vector>

#include "subrc/curvature.hpp"

namespace subrc {

/// Ordered key-value tree; the single source for both report renderings.
struct Node {
  std::string key;
  std::string value;
  bool is_leaf = false;
  std::vector<Node> children;

  explicit Node(std::string k = "report") : key(std::move(k)) {}

  Node& child(const std::string& k) {
    for (auto& c : children)
      if (c.key == k) return c;
    children.emplace_back(k);
    return children.back();
  }

  void set(const std::string& k, const std::string& v) {
    Node& c = child(k);
    c.is_leaf = true;
    c.value = v;
  }
};

struct Report {
  Node root;
};

inline void set_status(Node& item, const std::string& s, const std::string& detail = "") {
  item.set("status", s);
  if (!detail.empty()) item.set("detail", detail);
}

/// Required check: fail drives the exit code.
inline void check_item(Node& section, const std::string& name, bool pass,
                       const std::string& detail = "") {
  set_status(section.child(name), pass ? "pass" : "fail", pass ? "" : detail);
}

/// Conditional identity: evaluated always; an unmet hypothesis downgrades any
/// violation to an informational note and never affects the exit code.
inline void conditional_item(Node& section, const std::string& name, const ConditionalCheck& c) {
  Node& item = section.child(name);
  if (c.hypothesis_met) {
    set_status(item, c.holds ? "pass" : "fail");
  } else {
    set_status(item, "info");
    item.set("residual_zero", c.holds ? "yes" : "no");
    item.set("note", "hypothesis not met; residual informational only");
  }
}

inline void render_structured(const Node& n, std::string& out, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.is_leaf) {
    out += pad + n.key + " = " + n.value + "\n";
    return;
  }
  out += pad + n.key + " {\n";
  for (const auto& c : n.children) render_structured(c, out, depth + 1);
  out += pad + "}\n";
}

/// Machine-readable rendering: a deterministic nested key-value tree.
inline std::string render_structured(const Report& r) {
  std::string out;
  render_structured(r.root, out, 0);
  return out;
}

inline void render_text_leaves(const Node& n, const std::string& prefix, std::string& out) {
  for (const auto& c : n.children) {
    std::string path = prefix.empty() ? c.key : prefix + "." + c.key;
    if (c.is_leaf) {
      if (c.key == "status") {
        std::string mark = c.value == "pass"   ? "[PASS]"
                           : c.value == "fail" ? "[FAIL]"
                           : c.value == "unmet" ? "[SKIP]"
                                                : "[INFO]";
        out += "  " + mark + " " + prefix + "\n";
      } else {
        out += "    " + path + " = " + c.value + "\n";
      }
    } else {
      render_text_leaves(c, path, out);
    }
  }
}

/// Human-readable rendering; carries the same data as the structured tree.
inline std::string render_text(const Report& r) {
  std::string out;
  for (const auto& section : r.root.children) {
    if (section.is_leaf) {
      out += section.key + " = " + section.value + "\n";
      continue;
    }
    if (section.children.empty()) continue;  // empty sections omitted in text
    out += "== " + section.key + " ==\n";
    render_text_leaves(section, "", out);
  }
  return out;
}

inline void collect_statuses(const Node& n, bool in_validation, bool& any_fail,
                             bool& any_validation_fail, bool& any_unmet) {
  if (n.is_leaf) {
    if (n.key == "status" && n.value == "fail") {
      any_fail = true;
      if (in_validation) any_validation_fail = true;
    }
    if (n.key == "status" && n.value == "unmet") any_unmet = true;
    return;
  }
  for (const auto& c : n.children)
    collect_statuses(c, in_validation || n.key == "validation", any_fail, any_validation_fail,
                     any_unmet);
}

/// 0 = all pass, 1 = input invalid, 2 = identity violation, 3 = hypotheses
/// unmet (informational).
inline int exit_code(const Report& r) {
  bool any_fail = false, any_validation_fail = false, any_unmet = false;
  collect_statuses(r.root, false, any_fail, any_validation_fail, any_unmet);
  if (any_validation_fail) return 1;
  if (any_fail) return 2;
  if (any_unmet) return 3;
  return 0;
}

}  // namespace subrc
