"""Model spaces, the SU(2) / SU(1,1) bridge, bundle geometry and the finite-difference oracle."""
