#pragma once

#include "lerw/domain.hpp"

namespace lerw {

// Conformal map f from the (internal-frame) domain to the half-plane model in
// which Loewner evolutions run, normalized by f(0) = 0.
//
// Hole-free truncated domains are upper half-disks {|z - c| < R, Im z > 0};
// for those f is the exact half-disk uniformizer
//     psi(w) = R^2 w / (R - w)^2,  f(z) = psi(z - c) - psi(-c),
// so the truncation circle is part of the half-plane boundary. Domains with
// holes use the identity.
class Uniformizer {
public:
    static Uniformizer identity();
    static Uniformizer half_disk(double radius, Complex center);
    static Uniformizer for_domain(const Domain& d);

    bool is_identity() const { return identity_; }
    Complex map(Complex z) const;
    Complex unmap(Complex w) const;
    Complex derivative(Complex z) const;

private:
    bool identity_ = true;
    double R_ = 0.0;
    Complex c_{};
    Complex shift_{};
    Complex psi(Complex w) const;
};

}  // namespace lerw
