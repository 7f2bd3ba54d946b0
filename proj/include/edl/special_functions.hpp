#pragma once

namespace edl {

// Natural log of the gamma function. Domain: finite x > 0, else std::domain_error.
double log_gamma(double x);

// Digamma, the derivative of log_gamma. Domain: finite x > 0.
double digamma(double x);

// Trigamma, the derivative of digamma. Domain: finite x > 0.
double trigamma(double x);

}
