from lbeta.matrix.matrix_generation import Matrix, create_matrix, matrix
from lbeta.matrix.range import frange
