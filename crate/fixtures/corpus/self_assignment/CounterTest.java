package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class CounterTest {
    @Test
    public void totalIsKept() {
        assertEquals(12, new Counter(2, 10).showBug());
    }
}
