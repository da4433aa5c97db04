// Copyright 2026 The LeakScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Minimal HTML well-formedness checker for the generated reports: balanced
// tags, quoted attributes, no external resources.

#ifndef LEAKSCOPE_TESTS_HTML_CHECK_H_
#define LEAKSCOPE_TESTS_HTML_CHECK_H_

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace leakscope::testing {

struct HtmlElement {
  std::string name;
  std::map<std::string, std::string> attributes;
};

struct HtmlParseResult {
  bool ok = false;
  std::string error;
  std::vector<HtmlElement> elements;  // opening tags in document order
};

inline std::string UnescapeHtml(const std::string& text) {
  static const std::vector<std::pair<std::string, std::string>> kEntities = {
      {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&amp;", "&"}};
  std::string out;
  for (size_t i = 0; i < text.size();) {
    bool matched = false;
    for (const auto& [entity, value] : kEntities) {
      if (text.compare(i, entity.size(), entity) == 0) {
        out += value;
        i += entity.size();
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(text[i++]);
  }
  return out;
}

inline HtmlParseResult ParseHtml(const std::string& html) {
  static const std::set<std::string> kVoid = {"meta", "br", "hr", "img", "link", "input"};
  static const std::set<std::string> kRawText = {"style", "script"};
  HtmlParseResult result;
  std::vector<std::string> stack;
  auto fail = [&](const std::string& message, size_t at) {
    result.ok = false;
    result.error = message + " at offset " + std::to_string(at);
    return result;
  };
  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      if (html[i] == '>') return fail("stray '>'", i);
      ++i;
      continue;
    }
    if (html.compare(i, 9, "<!DOCTYPE") == 0) {
      const size_t end = html.find('>', i);
      if (end == std::string::npos) return fail("unterminated doctype", i);
      i = end + 1;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const size_t end = html.find("-->", i);
      if (end == std::string::npos) return fail("unterminated comment", i);
      i = end + 3;
      continue;
    }
    const bool closing = i + 1 < html.size() && html[i + 1] == '/';
    size_t j = i + (closing ? 2 : 1);
    std::string name;
    while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) != 0)) {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(html[j++]))));
    }
    if (name.empty()) return fail("bad tag name", i);
    if (closing) {
      if (j >= html.size() || html[j] != '>') return fail("bad closing tag", i);
      if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">", i);
      stack.pop_back();
      i = j + 1;
      continue;
    }
    HtmlElement element{name, {}};
    bool self_closed = false;
    while (true) {
      while (j < html.size() && std::isspace(static_cast<unsigned char>(html[j])) != 0) ++j;
      if (j >= html.size()) return fail("unterminated tag", i);
      if (html[j] == '>') {
        ++j;
        break;
      }
      if (html.compare(j, 2, "/>") == 0) {
        self_closed = true;
        j += 2;
        break;
      }
      std::string attr;
      while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) != 0 ||
                                 html[j] == '-' || html[j] == '_')) {
        attr.push_back(html[j++]);
      }
      if (attr.empty()) return fail("bad attribute", j);
      std::string value;
      if (j < html.size() && html[j] == '=') {
        ++j;
        if (j >= html.size() || html[j] != '"') return fail("unquoted attribute", j);
        const size_t end = html.find('"', j + 1);
        if (end == std::string::npos) return fail("unterminated attribute", j);
        value = html.substr(j + 1, end - j - 1);
        if (value.find('<') != std::string::npos) return fail("'<' inside attribute", j);
        j = end + 1;
      }
      if (!element.attributes.emplace(attr, UnescapeHtml(value)).second) {
        return fail("duplicate attribute " + attr, j);
      }
    }
    result.elements.push_back(element);
    if (kRawText.count(name) != 0) {
      const std::string close = "</" + name + ">";
      const size_t end = html.find(close, j);
      if (end == std::string::npos) return fail("unterminated <" + name + ">", i);
      i = end + close.size();
      continue;
    }
    if (!self_closed && kVoid.count(name) == 0) stack.push_back(name);
    i = j;
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">", html.size());
  result.ok = true;
  return result;
}

// True when the document loads nothing from outside itself.
inline bool IsSelfContained(const std::string& html) {
  for (const char* needle : {"src=", "href=", "http://", "https://", "@import", "url(",
                             "<link", "<script", "<iframe"}) {
    if (html.find(needle) != std::string::npos) return false;
  }
  return true;
}

}  // namespace leakscope::testing

#endif  // LEAKSCOPE_TESTS_HTML_CHECK_H_
