#pragma once

#include <gtest/gtest.h>

#include "oracles.hpp"

#define EXPECT_ERROR_KIND(statement, expected_kind)                                                 \
    do {                                                                                            \
        try {                                                                                       \
            statement;                                                                              \
            ADD_FAILURE() << "expected " << lada::to_string(expected_kind) << ", nothing thrown";  \
        } catch (const lada::Error& e) {                                                            \
            EXPECT_EQ(e.kind(), expected_kind) << e.what();                                         \
        }                                                                                           \
    } while (0)
