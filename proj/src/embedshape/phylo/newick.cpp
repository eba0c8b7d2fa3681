#include <cctype>
#include <cmath>
#include <fstream>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/numfmt.hpp"
#include "embedshape/phylo/phylo_tree.hpp"

namespace embedshape {
namespace {

bool needs_quotes(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label)
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("()[]':;,").find(c) != std::string_view::npos)
      return true;
  return false;
}

std::string format_label(const std::string& label) {
  if (!needs_quotes(label)) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string format_length(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  PhyloTree parse() {
    skip();
    if (at_end()) fail("empty Newick text");
    const int root = subtree();
    skip();
    if (at_end() || text_[pos_] != ';') fail("expected ';' at end of tree");
    ++pos_;
    skip();
    if (!at_end()) fail("unexpected text after ';'");
    tree_.set_root(root);
    tree_.set_rooted(tree_.node(root).children.size() < 3);
    return std::move(tree_);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    throw ParseError("Newick: " + msg + " (offset " + std::to_string(pos_) + ")", line);
  }

  void skip() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (at_end() || text_[pos_] != '[') return;
      const auto close = text_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated comment");
      pos_ = close + 1;
    }
  }

  int subtree() {
    skip();
    int id;
    if (!at_end() && text_[pos_] == '(') {
      ++pos_;
      id = tree_.add_node();
      for (;;) {
        tree_.attach(id, subtree());
        skip();
        if (at_end()) fail("unbalanced parentheses");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(std::string("unexpected character '") + text_[pos_] + "'");
      }
      tree_.node(id).label = label();
    } else {
      std::string name = label();
      if (name.empty()) fail("leaf without a label");
      id = tree_.add_node(std::move(name));
    }
    skip();
    if (!at_end() && text_[pos_] == ':') {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (!at_end() && std::string_view("(),:;[ \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
      double v;
      if (!parse_double(text_.substr(start, pos_ - start), v) || !std::isfinite(v))
        fail("invalid branch length '" + std::string(text_.substr(start, pos_ - start)) + "'");
      tree_.node(id).length = v;
    }
    return id;
  }

  std::string label() {
    skip();
    std::string out;
    if (!at_end() && text_[pos_] == '\'') {
      ++pos_;
      for (;;) {
        if (at_end()) fail("unterminated quoted label");
        const char c = text_[pos_++];
        if (c == '\'') {
          if (!at_end() && text_[pos_] == '\'') {
            out += '\'';
            ++pos_;
            continue;
          }
          return out;
        }
        out += c;
      }
    }
    while (!at_end() && std::string_view("(),:;[]' \t\r\n").find(text_[pos_]) == std::string_view::npos)
      out += text_[pos_++];
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  PhyloTree tree_;
};

void write_subtree(const PhyloTree& tree, int id, std::string& out) {
  const PhyloNode& n = tree.node(id);
  if (!n.is_leaf()) {
    out += '(';
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += ',';
      write_subtree(tree, n.children[i], out);
    }
    out += ')';
  }
  out += format_label(n.label);
  if (n.length) out += ':' + format_length(*n.length);
}

}  // namespace

std::string write_newick(const PhyloTree& tree) {
  std::string out;
  if (tree.root() >= 0) write_subtree(tree, tree.root(), out);
  out += ';';
  return out;
}

PhyloTree parse_newick(std::string_view text) { return NewickParser(text).parse(); }

PhyloTree read_newick_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_newick(text);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

}  // namespace embedshape
