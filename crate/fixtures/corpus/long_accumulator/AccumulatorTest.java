package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class AccumulatorTest {
    @Test
    public void largeSum() {
        assertEquals(3000000000L, (long) new Accumulator().showBug(6000));
    }
}
