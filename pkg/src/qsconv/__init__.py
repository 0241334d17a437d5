"""Finite-dimensional laboratory for completely positive quantum stochastic
convolution cocycles: hyperbialgebras, stochastic generators and their
characterizing tuples, *-homomorphic dilations, Stinespring decompositions,
and weak-solution dynamics against exponential vectors."""

from .algebra import (Coalgebra, FiniteHyperbialgebra, FiniteStarAlgebra, Functional,
                      compose_with_expectation, conv_exp, convolve, counit_functional,
                      function_algebra, group_algebra, is_positive_functional, r_map,
                      verify_hyperbialgebra)
from .dilation import (DilationResult, check_homold, check_tuple_conditions, dilate,
                       homold_residual, unitality_conditions, verify_dilation)
from .dynamics import (StepFunction, WeakTrajectory, check_convolution_increment,
                       compressed_generator, contractivity_gram, dilation_process_check,
                       exp_inner, gram_positivity, semigroup_consistency,
                       stinespring_process_check, weak_evolution, weak_trajectory)
from .expectation import (BialgebraMorphism, ConditionalExpectation, GroupAction,
                          delsarte_expectation, double_coset_expectation,
                          quotient_hyperbialgebra, verify_conditional_expectation)
from .generator import (GeneratorKernel, GeneratorMap, GeneratorTuple, KolmogorovData,
                        NoiseSpace, assemble_from_tuple, build_kernel, cp_decomposition,
                        extract_tuple, extraction_report, induce_representation, is_cpc,
                        kolmogorov_extract, markov_generator, solve_e, solve_inner_vector)
from .numerics import (PsdCertificate, is_psd, kron, least_squares_solve, matrix_exp,
                       minimal_rank_factor, psd_sqrt)
from .stinespring import (StinespringData, build_tau, build_theta,
                          check_contraction_condition, contraction_combination,
                          perturbed_generator, right_perturbed_generator,
                          verify_stinespring_identity)

__version__ = "0.1.0"
