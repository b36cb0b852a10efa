// text_util.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The t2tmap Authors.
//
// \file
// Small helpers for the line-oriented text formats.

#ifndef T2T_TEXT_UTIL_H_
#define T2T_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace t2t {

// Splits on every occurrence of `sep`; empty fields are kept.
std::vector<std::string> SplitFields(std::string_view line, char sep = '\t');

// Splits on runs of ASCII whitespace; no empty fields.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string Join(const std::vector<std::string> &parts,
                 std::string_view sep = " ");

// Shortest decimal form that parses back to the same double.
std::string FormatShortest(double value);

// 17 significant digits ("%.17g").
std::string FormatPrecise(double value);

// Parses the whole of `text` as a double; returns false on any junk.
bool ParseDouble(std::string_view text, double *value);
bool ParseInt(std::string_view text, long long *value);

// Reads a file as LF-separated lines (a trailing newline does not produce an
// empty last line; a trailing '\r' is not stripped). Throws ParseError when
// the file cannot be opened.
std::vector<std::string> ReadLines(const std::string &path);

// Throws Error(kGeneric) when the file cannot be written.
void WriteTextFile(const std::string &path, const std::string &contents);

}  // namespace t2t

#endif  // T2T_TEXT_UTIL_H_
