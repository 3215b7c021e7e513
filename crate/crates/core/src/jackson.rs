//! Open Jackson network baseline: every station is treated as M/M/m and all
//! SCV inputs are ignored.

use alloc::vec::Vec;

use crate::error::SolveError;
use crate::model::{Method, PerfReport, QueueMetrics, ValidatedNetwork};
use crate::qna::{self, attach_queue};

pub fn analyze_jackson(net: &ValidatedNetwork) -> Result<PerfReport, SolveError> {
    let lambda = qna::solve_flows(net)?;
    let rho = qna::utilizations(net, &lambda)?;
    let visits = qna::visit_ratios(net, &lambda);
    let per_queue = net
        .queues()
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let wait = qna::waiting_time_mmm(q.servers, lambda[k], q.service_rate).map_err(|e| attach_queue(e, q.id))?;
            Ok(QueueMetrics {
                queue: q.id,
                stage: q.stage,
                total_arrival_rate: lambda[k],
                arrival_scv: 1.0,
                utilization: rho[k],
                mean_wait: wait,
                mean_sojourn: wait + 1.0 / q.service_rate,
                visit_ratio: visits[k],
            })
        })
        .collect::<Result<Vec<_>, SolveError>>()?;
    Ok(qna::finish(per_queue, Method::Jackson))
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use approx::assert_relative_eq;

    use super::*;
    use crate::model::{NetworkSpec, QueueSpec, RoutingMatrix};

    #[test]
    fn mm1() {
        let n = NetworkSpec { queues: vec![QueueSpec::new(1, 1, 1, 1.0, 0.0, 0.5, 0.0)], routing: RoutingMatrix::zeros(1) }
            .validate()
            .unwrap();
        let r = analyze_jackson(&n).unwrap();
        assert_relative_eq!(r.mean_response_time, 2.0, epsilon = 1e-14);
        assert_eq!(r.method, Method::Jackson);
    }

    #[test]
    fn ignores_scvs() {
        let build = |cs: f64, c0: f64| {
            NetworkSpec {
                queues: vec![QueueSpec::new(1, 1, 2, 3.0, cs, 2.0, c0), QueueSpec::new(2, 2, 1, 4.0, cs * 2.0, 0.5, c0)],
                routing: RoutingMatrix::from_rows(vec![vec![0.0, 0.7], vec![0.2, 0.0]]),
            }
            .validate()
            .unwrap()
        };
        assert_eq!(analyze_jackson(&build(0.0, 0.0)).unwrap(), analyze_jackson(&build(3.0, 7.0)).unwrap());
    }

    #[test]
    fn multiplier_still_solves() {
        let n = NetworkSpec {
            queues: vec![QueueSpec::new(1, 1, 1, 10.0, 1.0, 1.0, 1.0).with_multiplier(1.5)],
            routing: RoutingMatrix::from_rows(vec![vec![0.5]]),
        }
        .validate()
        .unwrap();
        let r = analyze_jackson(&n).unwrap();
        assert_relative_eq!(r.per_queue[0].total_arrival_rate, 4.0, max_relative = 1e-12);
    }
}
