#pragma once

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "hirank/errors.hpp"
#include "hirank/field.hpp"
#include "hirank/geometry.hpp"
#include "hirank/poly.hpp"

namespace hirank::test {

inline Poly P(const Field& F, int n, const std::string& s) { return parse_poly(s, n, F); }

inline PolyFamily family(const Field& F, int n, const std::vector<std::string>& polys) {
  PolyFamily fam{F, n, {}};
  for (auto& s : polys) fam.members.push_back(parse_poly(s, n, F));
  return fam;
}

inline Variety variety(const Field& F, int n, const std::vector<std::string>& polys) {
  return Variety(family(F, n, polys));
}

#define EXPECT_HIRANK_ERROR(stmt, ecode)                                  \
  do {                                                                    \
    try {                                                                 \
      stmt;                                                               \
      ADD_FAILURE() << "expected " #ecode;                                \
    } catch (const ::hirank::Error& e__) {                                \
      EXPECT_EQ(e__.code(), ::hirank::ErrorCode::ecode) << e__.what();    \
    }                                                                     \
  } while (0)

}  // namespace hirank::test
